#include "voxcast/dvr.hpp"

#include <atomic>
#include <cmath>

#include "voxcast/error.hpp"
#include "voxcast/threading.hpp"

namespace voxcast {

namespace {

constexpr double kRhoGuard = 1e-12;  // below this, use the pure emission increment

/// Shared marching core. Consumes samples with parameter
/// t = anchor + (i + 1/2) step while t < span_end, updating the pixel
/// state in place. chord_len only feeds the depth-palette transfer
/// function input.
void march_span(PixelState& st, const FieldSampler& field, const TransferFunction& tf,
                const Ray& ray, double anchor, double chord_len, double span_end,
                double depth_limit, OpticalModel model, double step, double term_eps,
                std::uint64_t& samples) {
    const int nc = field.channels();
    const bool want_grad = tf.needs_gradient();
    float values[kMaxChannels];
    while (true) {
        const double t = anchor + (st.next_sample + 0.5) * step;
        if (!(t < span_end)) break;
        if (t >= depth_limit) {  // opaque geometry reached
            st.terminated = 1;
            break;
        }
        const Vec3 p = ray.at(t);
        field.sample(p, values);
        const double grad = want_grad ? length(field_gradient(field, p)) : 0.0;
        const double depth_frac = chord_len > 0.0 ? (t - anchor) / chord_len : 0.0;
        Vec3 c;
        double rho = 0.0;
        tf.shade(values, nc, grad, depth_frac, c, rho);
        ++samples;
        ++st.next_sample;

        switch (model) {
            case OpticalModel::emission: {
                st.rgb[0] += c.x * step;
                st.rgb[1] += c.y * step;
                st.rgb[2] += c.z * step;
                break;
            }
            case OpticalModel::emission_absorption: {
                double w;
                double a;
                if (rho > kRhoGuard) {
                    a = 1.0 - std::exp(-rho * step);
                    w = st.transmittance * a / rho;
                } else {
                    a = 0.0;
                    w = st.transmittance * step;
                }
                st.rgb[0] += c.x * w;
                st.rgb[1] += c.y * w;
                st.rgb[2] += c.z * w;
                st.transmittance *= 1.0 - a;
                if (st.transmittance < term_eps) {
                    st.terminated = 1;
                    return;
                }
                break;
            }
            case OpticalModel::mip: {
                st.rgb[0] = std::max(st.rgb[0], c.x);
                st.rgb[1] = std::max(st.rgb[1], c.y);
                st.rgb[2] = std::max(st.rgb[2], c.z);
                break;
            }
        }
    }
}

IntegrationResult integrate_whole(const FieldSampler& field, const TransferFunction& tf,
                                  const Ray& ray, double step, double term_eps,
                                  double depth_limit, OpticalModel model) {
    if (!(step > 0.0)) throw Error("integrate: step must be positive");
    PixelState st;
    std::uint64_t samples = 0;
    ChordSpan span = volume_span(ray, field.bounds(), 0.0,
                                 std::numeric_limits<double>::max());
    if (span.hit)
        march_span(st, field, tf, ray, span.t0, span.t1 - span.t0, span.t1, depth_limit,
                   model, step, term_eps, samples);
    IntegrationResult out;
    out.rgb = {st.rgb[0], st.rgb[1], st.rgb[2]};
    out.alpha = -std::log(st.transmittance);
    out.samples = samples;
    return out;
}

}  // namespace

ChordSpan volume_span(const Ray& ray, const AABB& bounds, double near_clip, double far_clip) {
    ChordSpan span;
    double t0, t1;
    if (!bounds.clip_ray(ray, t0, t1)) return span;
    t0 = std::max(t0, near_clip);
    t1 = std::min(t1, far_clip);
    if (!(t1 > t0)) return span;
    span.t0 = t0;
    span.t1 = t1;
    span.hit = true;
    return span;
}

IntegrationResult integrate_emission(const FieldSampler& field, const TransferFunction& tf,
                                     const Ray& ray, double step, double depth_limit) {
    return integrate_whole(field, tf, ray, step, 0.0, depth_limit, OpticalModel::emission);
}

IntegrationResult integrate_emission_absorption(const FieldSampler& field,
                                                const TransferFunction& tf, const Ray& ray,
                                                double step, double term_eps,
                                                double depth_limit) {
    if (!(term_eps > 0.0 && term_eps < 1.0))
        throw Error("integrate: term_eps must be in (0,1)");
    return integrate_whole(field, tf, ray, step, term_eps, depth_limit,
                           OpticalModel::emission_absorption);
}

IntegrationResult integrate_mip(const FieldSampler& field, const TransferFunction& tf,
                                const Ray& ray, double step, double depth_limit) {
    return integrate_whole(field, tf, ray, step, 0.0, depth_limit, OpticalModel::mip);
}

void WrappedFramebuffer::set_depth_limits(const DepthDistanceBuffer& depth) {
    if (depth.width != width || depth.height != height)
        throw Error("framebuffer: depth buffer size mismatch");
    depth_limit = depth.dist;
}

Image4f WrappedFramebuffer::resolve() const {
    Image4f img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const PixelState& st = at(x, y);
            float* d = img.at(x, y);
            d[0] = static_cast<float>(st.rgb[0]);
            d[1] = static_cast<float>(st.rgb[1]);
            d[2] = static_cast<float>(st.rgb[2]);
            d[3] = static_cast<float>(1.0 - st.transmittance);
        }
    return img;
}

void render_block_pass(WrappedFramebuffer& fb, const FieldSampler& field, const AABB& box,
                       const AABB& volume_bounds, const Camera& camera, const WarpMap& warp,
                       const TransferFunction& tf, const RenderOptions& opts,
                       RenderStats& stats) {
    std::atomic<std::uint64_t> total_samples{0};
    parallel_for(fb.height, opts.threads, [&](std::int64_t y0, std::int64_t y1) {
        std::uint64_t samples = 0;
        for (std::int64_t y = y0; y < y1; ++y)
            for (int x = 0; x < fb.width; ++x) {
                PixelState& st = fb.at(x, static_cast<int>(y));
                if (st.terminated) continue;
                const Ray ray = warp.ray_for_pixel(camera, x, static_cast<int>(y));
                const ChordSpan chord =
                    volume_span(ray, volume_bounds, camera.near_clip, camera.far_clip);
                if (!chord.hit) continue;
                double b0, b1;
                if (!box.clip_ray(ray, b0, b1)) continue;
                const double span_end = std::min(b1, chord.t1);
                march_span(st, field, tf, ray, chord.t0, chord.t1 - chord.t0, span_end,
                           fb.depth_limit[static_cast<size_t>(y) * fb.width + x], opts.model,
                           opts.step, opts.term_eps, samples);
            }
        total_samples.fetch_add(samples, std::memory_order_relaxed);
    });
    stats.samples += total_samples.load();
}

WrappedFramebuffer render_frame(const RenderSchedule& schedule, const VolumeMeta& meta,
                                BlockCache& render_cache, const Camera& camera,
                                const WarpMap& warp, const TransferFunction& tf,
                                const RenderOptions& opts, RenderStats& stats,
                                const DepthDistanceBuffer* warped_depth) {
    WrappedFramebuffer fb(warp.wrapped_width(), warp.wrapped_height());
    if (warped_depth) fb.set_depth_limits(*warped_depth);
    stats.rays += static_cast<std::uint64_t>(fb.width) * fb.height;
    const AABB volume_bounds = meta.world_bounds();
    for (const ScheduledBlock& sb : schedule.blocks) {
        auto block = render_cache.peek(sb.key);
        if (!block) continue;  // requested during traversal; coarser data covers it
        const CachedLevelField field(meta, sb.key, render_cache);
        render_block_pass(fb, field, sb.box, volume_bounds, camera, warp, tf, opts, stats);
        ++stats.blocks_rendered;
    }
    for (const PixelState& st : fb.px)
        if (st.terminated) ++stats.pixels_terminated;
    return fb;
}

}  // namespace voxcast
