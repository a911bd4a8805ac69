#pragma once

#include "voxcast/camera.hpp"
#include "voxcast/geometry.hpp"
#include "voxcast/image.hpp"

namespace voxcast {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// Invertible pixel-coordinate transform between the wrapped space
/// where rays are distributed uniformly and the display (view) space
/// where they end up denser in the middle.
///
/// The radial variant scales radius r from the image center by
/// (1 + k1 r^2 + k2 r^4), angle preserved, renormalized per direction
/// so the unit square maps onto itself. The radius map must be
/// strictly monotone; construction rejects coefficients that fold.
class WarpMap {
  public:
    enum class Variant { identity, radial };

    static WarpMap identity(int wrapped_w, int wrapped_h, int out_w, int out_h);
    static WarpMap radial(double k1, double k2, int wrapped_w, int wrapped_h, int out_w,
                          int out_h);

    Variant variant() const { return variant_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }
    int wrapped_width() const { return wrapped_w_; }
    int wrapped_height() const { return wrapped_h_; }
    int out_width() const { return out_w_; }
    int out_height() const { return out_h_; }

    /// wrapped -> view, both in normalized [0,1]^2.
    Vec2 forward(const Vec2& p) const;

    /// view -> wrapped; bisection on the monotone radius map,
    /// converged well below 1e-6.
    Vec2 inverse(const Vec2& q) const;

    /// Ray cast for a wrapped pixel: warp the normalized coordinate,
    /// then reverse-project through the camera.
    Ray ray_for_pixel(const Camera& camera, int px, int py) const;

  private:
    WarpMap() = default;

    double radius_map(double r) const { return r * (1.0 + k1_ * r * r + k2_ * r * r * r * r); }
    static double boundary_radius(const Vec2& dir);

    Variant variant_ = Variant::identity;
    double k1_ = 0.0, k2_ = 0.0;
    int wrapped_w_ = 0, wrapped_h_ = 0;
    int out_w_ = 0, out_h_ = 0;
};

/// Resamples a wrapped framebuffer back to display space (bilinear at
/// the inverse-warped position). Identity maps of equal size copy
/// bit-for-bit.
Image4f unwarp_image(const Image4f& wrapped, const WarpMap& map);

}  // namespace voxcast
