#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace voxcast {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr bool operator==(const Vec3&) const = default;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double length_sq(const Vec3& v) { return dot(v, v); }

inline Vec3 normalized(const Vec3& v) {
    const double len = length(v);
    return len > 0.0 ? v / len : Vec3{0, 0, 0};
}

inline Vec3 min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

/// Ray with unit-length direction; parameter t is Euclidean distance
/// from the origin in world units (micrometers).
struct Ray {
    Vec3 origin;
    Vec3 dir;

    Vec3 at(double t) const { return origin + dir * t; }
};

struct AABB {
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};

    constexpr AABB() = default;
    constexpr AABB(const Vec3& lo_, const Vec3& hi_) : lo(lo_), hi(hi_) {}

    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }

    double volume() const {
        if (empty()) return 0.0;
        const Vec3 e = extent();
        return e.x * e.y * e.z;
    }

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }

    Vec3 corner(int i) const {
        return {(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z};
    }

    Vec3 closest_point(const Vec3& p) const {
        return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y),
                std::clamp(p.z, lo.z, hi.z)};
    }

    AABB intersection(const AABB& o) const { return {max(lo, o.lo), min(hi, o.hi)}; }

    /// Slab clip of a ray against the box. Returns false if the ray
    /// misses; otherwise [t0, t1] is the intersected parameter range
    /// clipped to t >= 0.
    bool clip_ray(const Ray& r, double& t0, double& t1) const {
        double tmin = 0.0;
        double tmax = std::numeric_limits<double>::max();
        for (int a = 0; a < 3; ++a) {
            const double o = r.origin[a], d = r.dir[a];
            if (std::abs(d) < 1e-300) {
                if (o < lo[a] || o > hi[a]) return false;
                continue;
            }
            double ta = (lo[a] - o) / d;
            double tb = (hi[a] - o) / d;
            if (ta > tb) std::swap(ta, tb);
            tmin = std::max(tmin, ta);
            tmax = std::min(tmax, tb);
            if (tmin > tmax) return false;
        }
        t0 = tmin;
        t1 = tmax;
        return true;
    }
};

/// Plane in Hessian form: dot(n, p) + d = 0; n points toward the
/// half-space considered "inside".
struct Plane {
    Vec3 n;
    double d = 0.0;

    double signed_distance(const Vec3& p) const { return dot(n, p) + d; }
};

inline double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }

}  // namespace voxcast
