#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "voxcast/block_cache.hpp"
#include "voxcast/camera.hpp"
#include "voxcast/field.hpp"
#include "voxcast/image.hpp"
#include "voxcast/octree.hpp"
#include "voxcast/transfer_function.hpp"
#include "voxcast/warp.hpp"

namespace voxcast {

enum class OpticalModel { emission, emission_absorption, mip };

struct RenderOptions {
    OpticalModel model = OpticalModel::emission;
    double step = 1.0;       // world units between samples
    double term_eps = 1e-3;  // transmittance threshold for early termination
    int threads = 1;
};

/// Per-pixel ray state persisted across block passes. Color is
/// premultiplied; transmittance T = e^{-alpha} stays 1 under the
/// emission-only and MIP models. next_sample indexes the global
/// sample grid anchored at the ray's volume entry point, which is
/// what makes multipass integration equal single-pass integration
/// exactly.
struct PixelState {
    double rgb[3] = {0, 0, 0};
    double transmittance = 1.0;
    std::uint32_t next_sample = 0;
    std::uint8_t terminated = 0;
};

struct RenderStats {
    std::uint64_t rays = 0;
    std::uint64_t samples = 0;
    std::uint64_t blocks_rendered = 0;
    std::uint64_t pixels_terminated = 0;
};

class WrappedFramebuffer {
  public:
    WrappedFramebuffer() = default;
    WrappedFramebuffer(int w, int h)
        : width(w), height(h), px(static_cast<size_t>(w) * h),
          depth_limit(static_cast<size_t>(w) * h, std::numeric_limits<double>::infinity()) {}

    int width = 0, height = 0;
    std::vector<PixelState> px;
    std::vector<double> depth_limit;  // Euclidean ray-termination distance

    PixelState& at(int x, int y) { return px[static_cast<size_t>(y) * width + x]; }
    const PixelState& at(int x, int y) const { return px[static_cast<size_t>(y) * width + x]; }

    void set_depth_limits(const DepthDistanceBuffer& depth);

    /// Premultiplied RGBA; A = 1 - T (zero for purely emissive rays).
    Image4f resolve() const;
};

struct ChordSpan {
    double t0 = 0.0, t1 = 0.0;
    bool hit = false;
};

/// Ray/volume intersection clipped to the camera clip range; t0 is
/// the anchor of the per-ray sample grid.
ChordSpan volume_span(const Ray& ray, const AABB& bounds, double near_clip, double far_clip);

struct IntegrationResult {
    Vec3 rgb;            // premultiplied under emission-absorption
    double alpha = 0.0;  // accumulated opacity, -ln(T)
    std::uint64_t samples = 0;
};

/// I = integral of c(x) dx over the ray's chord; alpha stays 0 so the
/// layer composites additively. Midpoint rule on the fixed step grid.
IntegrationResult integrate_emission(const FieldSampler& field, const TransferFunction& tf,
                                     const Ray& ray, double step,
                                     double depth_limit = std::numeric_limits<double>::infinity());

/// Front-to-back compositing of I = integral c(x) e^{-alpha(x)} dx with
/// opacity correction a_i = 1 - e^{-rho dt}; terminates once the
/// transmittance drops below term_eps.
IntegrationResult integrate_emission_absorption(
    const FieldSampler& field, const TransferFunction& tf, const Ray& ray, double step,
    double term_eps, double depth_limit = std::numeric_limits<double>::infinity());

/// Maximum intensity projection: per-channel max of c over the samples.
IntegrationResult integrate_mip(const FieldSampler& field, const TransferFunction& tf,
                                const Ray& ray, double step,
                                double depth_limit = std::numeric_limits<double>::infinity());

/// One schedule entry rendered into the framebuffer: every pixel whose
/// ray reaches into the block beyond its consumed range restores its
/// state, continues integration across the block on the globally
/// aligned sample grid, and writes the state back. Rows are
/// partitioned across threads; a pixel is owned by exactly one worker.
void render_block_pass(WrappedFramebuffer& fb, const FieldSampler& field, const AABB& box,
                       const AABB& volume_bounds, const Camera& camera, const WarpMap& warp,
                       const TransferFunction& tf, const RenderOptions& opts,
                       RenderStats& stats);

/// Folds render_block_pass over the schedule in order. Blocks absent
/// from the render cache are skipped (they are already queued).
WrappedFramebuffer render_frame(const RenderSchedule& schedule, const VolumeMeta& meta,
                                BlockCache& render_cache, const Camera& camera,
                                const WarpMap& warp, const TransferFunction& tf,
                                const RenderOptions& opts, RenderStats& stats,
                                const DepthDistanceBuffer* warped_depth = nullptr);

}  // namespace voxcast
