#include "voxcast/imposter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "voxcast/error.hpp"
#include "voxcast/threading.hpp"

namespace voxcast {

// --- SWC ----------------------------------------------------------------

std::vector<SWCNode> parse_swc(const std::string& text) {
    std::vector<SWCNode> nodes;
    std::set<std::int64_t> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        SWCNode n;
        if (!(ss >> n.id)) {
            std::string leftover;
            if (ss.clear(), ss >> leftover)
                throw FormatError("swc line " + std::to_string(lineno) + ": non-numeric id");
            continue;  // blank or comment-only line
        }
        if (!(ss >> n.type >> n.pos.x >> n.pos.y >> n.pos.z >> n.radius >> n.parent))
            throw FormatError("swc line " + std::to_string(lineno) +
                              ": expected 'id type x y z radius parent'");
        std::string extra;
        if (ss >> extra)
            throw FormatError("swc line " + std::to_string(lineno) + ": trailing field '" +
                              extra + "'");
        if (!seen.insert(n.id).second)
            throw FormatError("swc line " + std::to_string(lineno) + ": duplicate id " +
                              std::to_string(n.id));
        if (n.parent != -1 && !seen.count(n.parent))
            throw FormatError("swc line " + std::to_string(lineno) + ": parent " +
                              std::to_string(n.parent) + " not defined before child");
        if (!(n.radius > 0.0))
            throw FormatError("swc line " + std::to_string(lineno) + ": radius must be > 0");
        nodes.push_back(n);
    }
    return nodes;
}

std::string serialize_swc(const std::vector<SWCNode>& nodes) {
    std::string out;
    char buf[192];
    for (const SWCNode& n : nodes) {
        std::snprintf(buf, sizeof buf, "%lld %d %.17g %.17g %.17g %.17g %lld\n",
                      static_cast<long long>(n.id), n.type, n.pos.x, n.pos.y, n.pos.z,
                      n.radius, static_cast<long long>(n.parent));
        out += buf;
    }
    return out;
}

SwcTypePalette default_swc_palette() {
    // conventional SWC type codes: 0 undefined, 1 soma, 2 axon,
    // 3 basal dendrite, 4 apical dendrite
    return {{0, {0.85, 0.85, 0.85}},
            {1, {0.95, 0.45, 0.20}},
            {2, {0.30, 0.65, 0.95}},
            {3, {0.35, 0.85, 0.40}},
            {4, {0.90, 0.80, 0.25}}};
}

GuideSet guides_from_swc(const std::vector<SWCNode>& nodes, const SwcTypePalette& palette) {
    GuideSet set;
    std::map<std::int64_t, const SWCNode*> by_id;
    auto color_of = [&palette](int type) {
        const auto it = palette.find(type);
        if (it != palette.end()) return it->second;
        const auto fallback = palette.find(0);
        return fallback != palette.end() ? fallback->second : Vec3{1, 1, 1};
    };
    for (const SWCNode& n : nodes) {
        by_id[n.id] = &n;
        set.spheres.push_back({n.pos, n.radius, color_of(n.type)});
        if (n.parent != -1) {
            const SWCNode& p = *by_id.at(n.parent);
            // a tangent cone only exists when neither end sphere
            // swallows the other
            if (length(p.pos - n.pos) > std::abs(p.radius - n.radius) + 1e-12)
                set.cones.push_back({n.pos, p.pos, n.radius, p.radius, color_of(n.type)});
        }
    }
    return set;
}

// --- imposter geometry ----------------------------------------------------

ImposterQuad quad_for_sphere(const Camera& camera, const SphereGuide& sphere) {
    ImposterQuad quad;
    const Vec3 axis = sphere.center - camera.position;
    const double d = length(axis);
    if (d <= sphere.radius) {
        quad.full_screen = true;  // camera inside: correctness over economy
        return quad;
    }
    const Vec3 n = axis / d;
    const double h = sphere.radius * d / std::sqrt(d * d - sphere.radius * sphere.radius);
    Vec3 u = cross(n, camera.up);
    if (length_sq(u) < 1e-20) u = cross(n, camera.right);
    u = normalized(u);
    const Vec3 v = cross(n, u);
    quad.corners = {sphere.center - u * h - v * h, sphere.center + u * h - v * h,
                    sphere.center + u * h + v * h, sphere.center - u * h + v * h};
    return quad;
}

namespace {

// normalized view coordinates of a world point; false when behind the
// near plane
bool project_point(const Camera& cam, const Vec3& p, double& u, double& v) {
    const Vec3 rel = p - cam.position;
    const double z = dot(cam.forward, rel);
    if (z < cam.near_clip * 0.5) return false;
    const double th = std::tan(cam.vfov * 0.5);
    u = 0.5 + dot(cam.right, rel) / (2.0 * z * th * cam.aspect());
    v = 0.5 - dot(cam.up, rel) / (2.0 * z * th);
    return true;
}

ScreenRect full_viewport(const Camera& cam) {
    return {0, 0, cam.width - 1, cam.height - 1};
}

ScreenRect rect_from_bounds(const Camera& cam, double u0, double v0, double u1, double v1) {
    ScreenRect r;
    r.x0 = std::max(0, static_cast<int>(std::floor(u0 * cam.width - 0.5)));
    r.y0 = std::max(0, static_cast<int>(std::floor(v0 * cam.height - 0.5)));
    r.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(u1 * cam.width - 0.5)));
    r.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(v1 * cam.height - 0.5)));
    return r;
}

// projected bounds of one sphere's proxy quad, as normalized view
// coordinates; false -> use the full viewport
bool sphere_bounds(const Camera& cam, const SphereGuide& s, double& u0, double& v0, double& u1,
                   double& v1) {
    const ImposterQuad quad = quad_for_sphere(cam, s);
    if (quad.full_screen) return false;
    u0 = v0 = 1e30;
    u1 = v1 = -1e30;
    for (const Vec3& c : quad.corners) {
        double u, v;
        if (!project_point(cam, c, u, v)) return false;
        u0 = std::min(u0, u);
        u1 = std::max(u1, u);
        v0 = std::min(v0, v);
        v1 = std::max(v1, v);
    }
    return true;
}

}  // namespace

ScreenRect project_quad(const Camera& camera, const ImposterQuad& quad) {
    if (quad.full_screen) return full_viewport(camera);
    double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
    for (const Vec3& c : quad.corners) {
        double u, v;
        if (!project_point(camera, c, u, v)) return full_viewport(camera);
        u0 = std::min(u0, u);
        u1 = std::max(u1, u);
        v0 = std::min(v0, v);
        v1 = std::max(v1, v);
    }
    return rect_from_bounds(camera, u0, v0, u1, v1);
}

ScreenRect cage_for_cone(const Camera& camera, const ConeGuide& cone) {
    // union of the proxy-quad bounds of the interpolated spheres; the
    // end spheres alone under-cover when the midsection is closer to
    // the camera
    constexpr int kSegments = 64;
    double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
    for (int i = 0; i <= kSegments; ++i) {
        const double s = static_cast<double>(i) / kSegments;
        const SphereGuide interp{cone.a + (cone.b - cone.a) * s,
                                 cone.ra + (cone.rb - cone.ra) * s, cone.color};
        double su0, sv0, su1, sv1;
        if (!sphere_bounds(camera, interp, su0, sv0, su1, sv1)) return full_viewport(camera);
        u0 = std::min(u0, su0);
        u1 = std::max(u1, su1);
        v0 = std::min(v0, sv0);
        v1 = std::max(v1, sv1);
    }
    // half-pixel pad absorbs the sampling of the interpolation
    // parameter
    const double pad_u = 0.5 / camera.width, pad_v = 0.5 / camera.height;
    return rect_from_bounds(camera, u0 - pad_u, v0 - pad_v, u1 + pad_u, v1 + pad_v);
}

// --- analytic intersections -----------------------------------------------

std::optional<SurfaceHit> intersect_sphere(const Ray& ray, const SphereGuide& sphere) {
    const Vec3 oc = ray.origin - sphere.center;
    const double b = dot(oc, ray.dir);
    const double c = length_sq(oc) - sphere.radius * sphere.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t <= 1e-9) t = -b + sq;
    if (t <= 1e-9) return std::nullopt;
    return SurfaceHit{t, (ray.at(t) - sphere.center) / sphere.radius};
}

std::optional<SurfaceHit> intersect_cone(const Ray& ray, const ConeGuide& cone) {
    // envelope of the interpolated spheres: quadratic in t with the
    // tangency parameter recovered as y/d2 in [0,1]
    const Vec3 ba = cone.b - cone.a;
    const Vec3 oa = ray.origin - cone.a;
    const double rr = cone.ra - cone.rb;
    const double m0 = dot(ba, ba);
    const double m1 = dot(ba, oa);
    const double m2 = dot(ba, ray.dir);
    const double m3 = dot(ray.dir, oa);
    const double m5 = dot(oa, oa);
    const double d2 = m0 - rr * rr;
    if (d2 <= 0.0) return std::nullopt;  // no tangent cone exists

    const double k2 = d2 - m2 * m2;
    const double k1 = d2 * m3 - m1 * m2 + m2 * rr * cone.ra;
    const double k0 = d2 * m5 - m1 * m1 + 2.0 * m1 * rr * cone.ra - m0 * cone.ra * cone.ra;

    double roots[2];
    int nroots = 0;
    if (std::abs(k2) < 1e-14) {
        if (std::abs(k1) > 1e-14) roots[nroots++] = -k0 / (2.0 * k1);
    } else {
        const double h = k1 * k1 - k0 * k2;
        if (h < 0.0) return std::nullopt;
        const double sq = std::sqrt(h);
        roots[nroots++] = (-k1 - sq) / k2;
        roots[nroots++] = (-k1 + sq) / k2;
        if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    }
    for (int i = 0; i < nroots; ++i) {
        const double t = roots[i];
        if (t <= 1e-9) continue;
        const double y = m1 - cone.ra * rr + t * m2;  // tangency parameter times d2
        if (y < 0.0 || y > d2) continue;              // caps belong to the end spheres
        const Vec3 n = (oa + ray.dir * t) * d2 - ba * y;
        return SurfaceHit{t, normalized(n)};
    }
    return std::nullopt;
}

// --- rendering --------------------------------------------------------------

RasterOutput render_annotations(const GuideSet& guides, const Camera& camera, int width,
                                int height, const DirectionalLight& light, int threads,
                                std::uint64_t* pixels_tested) {
    RasterOutput out;
    out.color = Image3f(width, height);
    out.depth = DepthDistanceBuffer(width, height);

    struct Prim {
        ScreenRect rect;
        bool is_cone;
        std::size_t index;
    };
    std::vector<Prim> prims;
    prims.reserve(guides.spheres.size() + guides.cones.size());
    std::uint64_t tested = 0;
    for (std::size_t i = 0; i < guides.spheres.size(); ++i) {
        const ScreenRect r = project_quad(camera, quad_for_sphere(camera, guides.spheres[i]));
        if (!r.empty()) prims.push_back({r, false, i});
        tested += r.area();
    }
    for (std::size_t i = 0; i < guides.cones.size(); ++i) {
        const ScreenRect r = cage_for_cone(camera, guides.cones[i]);
        if (!r.empty()) prims.push_back({r, true, i});
        tested += r.area();
    }
    if (pixels_tested) *pixels_tested = tested;

    const Vec3 to_light = normalized(-light.dir);
    parallel_for(height, threads, [&](std::int64_t y0, std::int64_t y1) {
        for (const Prim& prim : prims) {
            const int py0 = std::max<int>(prim.rect.y0, static_cast<int>(y0));
            const int py1 = std::min<int>(prim.rect.y1, static_cast<int>(y1) - 1);
            for (int y = py0; y <= py1; ++y)
                for (int x = prim.rect.x0; x <= prim.rect.x1; ++x) {
                    const Ray ray =
                        camera.ray_through((x + 0.5) / width, (y + 0.5) / height);
                    std::optional<SurfaceHit> hit;
                    Vec3 color;
                    if (prim.is_cone) {
                        const ConeGuide& c = guides.cones[prim.index];
                        hit = intersect_cone(ray, c);
                        color = c.color;
                    } else {
                        const SphereGuide& s = guides.spheres[prim.index];
                        hit = intersect_sphere(ray, s);
                        color = s.color;
                    }
                    if (!hit || hit->t < camera.near_clip) continue;
                    double& zref = out.depth.at(x, y);
                    if (hit->t >= zref) continue;
                    zref = hit->t;
                    const double diff = std::max(0.0, dot(hit->normal, to_light));
                    const double f =
                        light.intensity * (light.ambient + (1.0 - light.ambient) * diff);
                    float* dst = out.color.at(x, y);
                    dst[0] = static_cast<float>(std::clamp(color.x * f, 0.0, 1.0));
                    dst[1] = static_cast<float>(std::clamp(color.y * f, 0.0, 1.0));
                    dst[2] = static_cast<float>(std::clamp(color.z * f, 0.0, 1.0));
                }
        }
    });
    return out;
}

}  // namespace voxcast
