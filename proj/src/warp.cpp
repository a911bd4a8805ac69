#include "voxcast/warp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "voxcast/error.hpp"

namespace voxcast {

WarpMap WarpMap::identity(int wrapped_w, int wrapped_h, int out_w, int out_h) {
    WarpMap m;
    m.variant_ = Variant::identity;
    m.wrapped_w_ = wrapped_w;
    m.wrapped_h_ = wrapped_h;
    m.out_w_ = out_w;
    m.out_h_ = out_h;
    return m;
}

WarpMap WarpMap::radial(double k1, double k2, int wrapped_w, int wrapped_h, int out_w,
                        int out_h) {
    WarpMap m;
    m.variant_ = Variant::radial;
    m.k1_ = k1;
    m.k2_ = k2;
    m.wrapped_w_ = wrapped_w;
    m.wrapped_h_ = wrapped_h;
    m.out_w_ = out_w;
    m.out_h_ = out_h;
    // strict monotonicity of r (1 + k1 r^2 + k2 r^4) on [0, r_corner]
    const double r_max = std::sqrt(0.5);
    double prev = 0.0;
    for (int i = 1; i <= 1024; ++i) {
        const double r = r_max * i / 1024.0;
        const double v = m.radius_map(r);
        if (!(v > prev))
            throw ConfigError("warp: radius map not monotone for k1=" + std::to_string(k1) +
                              " k2=" + std::to_string(k2));
        prev = v;
    }
    return m;
}

double WarpMap::boundary_radius(const Vec2& dir) {
    // distance from the center of the unit square to its boundary
    // along dir
    double r = std::numeric_limits<double>::max();
    if (std::abs(dir.x) > 1e-15) r = std::min(r, 0.5 / std::abs(dir.x));
    if (std::abs(dir.y) > 1e-15) r = std::min(r, 0.5 / std::abs(dir.y));
    return r;
}

Vec2 WarpMap::forward(const Vec2& p) const {
    if (variant_ == Variant::identity) return p;
    const double vx = p.x - 0.5, vy = p.y - 0.5;
    const double r = std::sqrt(vx * vx + vy * vy);
    if (r < 1e-12) return p;
    const Vec2 dir{vx / r, vy / r};
    const double R = boundary_radius(dir);
    const double g = R * radius_map(r) / radius_map(R);
    return {0.5 + dir.x * g, 0.5 + dir.y * g};
}

Vec2 WarpMap::inverse(const Vec2& q) const {
    if (variant_ == Variant::identity) return q;
    const double vx = q.x - 0.5, vy = q.y - 0.5;
    const double rq = std::sqrt(vx * vx + vy * vy);
    if (rq < 1e-12) return q;
    const Vec2 dir{vx / rq, vy / rq};
    const double R = boundary_radius(dir);
    const double target = std::min(rq, R) * radius_map(R) / R;  // g(r) = rq
    double lo = 0.0, hi = R;
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radius_map(mid) < target ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    return {0.5 + dir.x * r, 0.5 + dir.y * r};
}

Ray WarpMap::ray_for_pixel(const Camera& camera, int px, int py) const {
    const Vec2 p{(px + 0.5) / wrapped_w_, (py + 0.5) / wrapped_h_};
    const Vec2 q = forward(p);
    return camera.ray_through(q.x, q.y);
}

Image4f unwarp_image(const Image4f& wrapped, const WarpMap& map) {
    const int W = map.out_width(), H = map.out_height();
    if (map.variant() == WarpMap::Variant::identity && W == wrapped.width &&
        H == wrapped.height)
        return wrapped;  // bit-for-bit

    Image4f out(W, H);
    const int w = wrapped.width, h = wrapped.height;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const Vec2 q{(x + 0.5) / W, (y + 0.5) / H};
            const Vec2 p = map.inverse(q);
            // bilinear in wrapped pixel space, edge clamped
            const double sx = p.x * w - 0.5, sy = p.y * h - 0.5;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;
            float* dst = out.at(x, y);
            for (int c = 0; c < 4; ++c) dst[c] = 0.f;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const int xs = std::clamp(x0 + dx, 0, w - 1);
                    const int ys = std::clamp(y0 + dy, 0, h - 1);
                    const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                    const float* src = wrapped.at(xs, ys);
                    for (int c = 0; c < 4; ++c)
                        dst[c] += static_cast<float>(wgt * src[c]);
                }
        }
    return out;
}

}  // namespace voxcast
