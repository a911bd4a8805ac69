#pragma once

#include <array>

#include "voxcast/geometry.hpp"

namespace voxcast {

/// Pinhole camera. Right-handed frame, view direction along -z of the
/// camera frame; world units are micrometers. Pixel (0,0) is the top
/// left of the image.
struct Camera {
    Vec3 position;
    Vec3 right{1, 0, 0};
    Vec3 up{0, 1, 0};
    Vec3 forward{0, 0, -1};  // -z of the camera frame
    double vfov = deg_to_rad(60.0);
    int width = 512;
    int height = 512;
    double near_clip = 0.1;
    double far_clip = 1e9;

    static Camera look_at(const Vec3& position, const Vec3& target, const Vec3& up_hint,
                          double vfov, int width, int height, double near_clip,
                          double far_clip);

    double aspect() const { return static_cast<double>(width) / height; }

    /// Angular size of one pixel (square pixels assumed).
    double pixel_angle() const { return vfov / height; }

    /// Ray through normalized view coordinates (u right, v down),
    /// both in [0,1]; (0.5, 0.5) is the optical axis.
    Ray ray_through(double u, double v) const;

    /// Six inward-facing frustum planes (near, far, four sides).
    std::array<Plane, 6> frustum_planes() const;
};

/// Conservative AABB-vs-frustum test: never culls a visible box, may
/// keep borderline ones.
bool frustum_cull_keep(const AABB& box, const Camera& camera);

}  // namespace voxcast
