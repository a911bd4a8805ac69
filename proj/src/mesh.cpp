#include "voxcast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "voxcast/error.hpp"
#include "voxcast/threading.hpp"

namespace voxcast {

TriangleMesh load_obj(const std::string& path, const Vec3& color) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh: " + path);
    TriangleMesh mesh;
    std::vector<Vec3> file_normals;
    std::vector<std::int64_t> vertex_normal_idx;  // -1 until a face assigns one
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v, c = color;
            if (!(ss >> v.x >> v.y >> v.z))
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad vertex");
            double r, g, b;
            if (ss >> r >> g >> b) c = {r, g, b};  // optional vertex color extension
            mesh.vertices.push_back(v);
            mesh.colors.push_back(c);
            vertex_normal_idx.push_back(-1);
        } else if (tag == "vn") {
            Vec3 n;
            if (!(ss >> n.x >> n.y >> n.z))
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad normal");
            file_normals.push_back(normalized(n));
        } else if (tag == "f") {
            std::vector<std::pair<std::uint32_t, std::int64_t>> face;  // vertex, normal
            std::string item;
            while (ss >> item) {
                std::uint32_t vi = 0;
                std::int64_t ni = -1;
                const auto s1 = item.find('/');
                const std::string v_str = s1 == std::string::npos ? item : item.substr(0, s1);
                try {
                    const long v = std::stol(v_str);
                    if (v <= 0 || static_cast<std::size_t>(v) > mesh.vertices.size())
                        throw std::out_of_range("vertex index");
                    vi = static_cast<std::uint32_t>(v - 1);
                    if (s1 != std::string::npos) {
                        const auto s2 = item.find('/', s1 + 1);
                        const std::string n_str =
                            s2 == std::string::npos ? "" : item.substr(s2 + 1);
                        if (!n_str.empty()) {
                            const long n = std::stol(n_str);
                            if (n <= 0 || static_cast<std::size_t>(n) > file_normals.size())
                                throw std::out_of_range("normal index");
                            ni = n - 1;
                        }
                    }
                } catch (const std::exception&) {
                    throw FormatError(path + ":" + std::to_string(lineno) + ": bad face index '" +
                                      item + "'");
                }
                face.emplace_back(vi, ni);
            }
            if (face.size() < 3)
                throw FormatError(path + ":" + std::to_string(lineno) + ": face with <3 vertices");
            for (std::size_t i = 2; i < face.size(); ++i) {  // fan triangulation
                mesh.triangles.push_back({face[0].first, face[i - 1].first, face[i].first});
                for (const auto& [vi, ni] : {face[0], face[i - 1], face[i]})
                    if (ni >= 0) vertex_normal_idx[vi] = ni;
            }
        }
        // vt, o, g, s, mtllib, usemtl: ignored subset
    }

    mesh.normals.assign(mesh.vertices.size(), Vec3{0, 0, 0});
    bool any_missing = false;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        if (vertex_normal_idx[i] >= 0)
            mesh.normals[i] = file_normals[static_cast<std::size_t>(vertex_normal_idx[i])];
        else
            any_missing = true;
    }
    if (any_missing) {
        // accumulate area-weighted face normals
        for (const auto& t : mesh.triangles) {
            const Vec3 fn = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                                  mesh.vertices[t[2]] - mesh.vertices[t[0]]);
            for (const std::uint32_t vi : t)
                if (vertex_normal_idx[vi] < 0) mesh.normals[vi] += fn;
        }
        for (std::size_t i = 0; i < mesh.normals.size(); ++i)
            if (vertex_normal_idx[i] < 0) mesh.normals[i] = normalized(mesh.normals[i]);
    }
    return mesh;
}

namespace {

struct CamVertex {
    Vec3 cam;    // camera-space position, z is distance along view axis
    Vec3 world;
    Vec3 normal;
    Vec3 color;
};

CamVertex to_camera(const Camera& cam, const Vec3& p, const Vec3& n, const Vec3& c) {
    const Vec3 rel = p - cam.position;
    return {{dot(cam.right, rel), dot(cam.up, rel), dot(cam.forward, rel)}, p, n, c};
}

CamVertex lerp(const CamVertex& a, const CamVertex& b, double t) {
    auto mix = [t](const Vec3& u, const Vec3& v) { return u + (v - u) * t; };
    return {mix(a.cam, b.cam), mix(a.world, b.world), mix(a.normal, b.normal),
            mix(a.color, b.color)};
}

double shade_factor(const Vec3& n, const DirectionalLight& light) {
    const Vec3 to_light = normalized(-light.dir);
    const double diff = std::max(0.0, dot(normalized(n), to_light));
    return light.intensity * (light.ambient + (1.0 - light.ambient) * diff);
}

}  // namespace

RasterOutput rasterize(const TriangleMesh& mesh, const Camera& camera, int width, int height,
                       const DirectionalLight& light, int threads) {
    RasterOutput out;
    out.color = Image3f(width, height);
    out.depth = DepthDistanceBuffer(width, height);

    // clip each triangle against the near plane, then project
    struct ScreenVertex {
        double sx, sy;      // pixel coordinates
        double inv_z;       // 1 / camera z, for perspective correction
        Vec3 world_over_z;
        Vec3 normal_over_z;
        Vec3 color_over_z;
    };
    struct ScreenTri {
        ScreenVertex v[3];
        double min_y, max_y;
    };

    const double th = std::tan(camera.vfov * 0.5);
    auto project = [&](const CamVertex& v) {
        ScreenVertex s;
        const double u = 0.5 + v.cam.x / (2.0 * v.cam.z * th * camera.aspect());
        const double w = 0.5 - v.cam.y / (2.0 * v.cam.z * th);
        s.sx = u * width;
        s.sy = w * height;
        s.inv_z = 1.0 / v.cam.z;
        s.world_over_z = v.world * s.inv_z;
        s.normal_over_z = v.normal * s.inv_z;
        s.color_over_z = v.color * s.inv_z;
        return s;
    };

    std::vector<ScreenTri> tris;
    tris.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        CamVertex cv[3];
        for (int i = 0; i < 3; ++i)
            cv[i] = to_camera(camera, mesh.vertices[t[i]], mesh.normals[t[i]],
                              mesh.colors[t[i]]);
        // Sutherland-Hodgman against z >= near
        std::vector<CamVertex> poly;
        const double zn = camera.near_clip;
        for (int i = 0; i < 3; ++i) {
            const CamVertex& a = cv[i];
            const CamVertex& b = cv[(i + 1) % 3];
            const bool ain = a.cam.z >= zn, bin = b.cam.z >= zn;
            if (ain) poly.push_back(a);
            if (ain != bin) poly.push_back(lerp(a, b, (zn - a.cam.z) / (b.cam.z - a.cam.z)));
        }
        for (std::size_t i = 2; i < poly.size(); ++i) {
            ScreenTri st{{project(poly[0]), project(poly[i - 1]), project(poly[i])}, 0, 0};
            const double area = (st.v[1].sx - st.v[0].sx) * (st.v[2].sy - st.v[0].sy) -
                                (st.v[2].sx - st.v[0].sx) * (st.v[1].sy - st.v[0].sy);
            if (area == 0.0) continue;  // degenerate in screen space
            st.min_y = std::min({st.v[0].sy, st.v[1].sy, st.v[2].sy});
            st.max_y = std::max({st.v[0].sy, st.v[1].sy, st.v[2].sy});
            tris.push_back(st);
        }
    }

    // scanline bands: each worker owns a strip of rows, no merge needed
    parallel_for(height, threads, [&](std::int64_t y0, std::int64_t y1) {
        for (const ScreenTri& st : tris) {
            const int band_y0 = std::max<std::int64_t>(
                y0, static_cast<std::int64_t>(std::floor(st.min_y - 0.5)));
            const int band_y1 = std::min<std::int64_t>(
                y1 - 1, static_cast<std::int64_t>(std::ceil(st.max_y)));
            const double ax = st.v[0].sx, ay = st.v[0].sy;
            const double bx = st.v[1].sx, by = st.v[1].sy;
            const double cx = st.v[2].sx, cy = st.v[2].sy;
            const double area = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
            const double inv_area = 1.0 / area;
            const double min_x = std::min({ax, bx, cx});
            const double max_x = std::max({ax, bx, cx});
            const int px0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
            const int px1 = std::min(width - 1, static_cast<int>(std::ceil(max_x)));
            for (int y = band_y0; y <= band_y1; ++y) {
                if (y < 0 || y >= height) continue;
                const double py = y + 0.5;
                for (int x = px0; x <= px1; ++x) {
                    const double px = x + 0.5;
                    // barycentric via edge functions, sign-normalized
                    double w0 = ((bx - px) * (cy - py) - (cx - px) * (by - py)) * inv_area;
                    double w1 = ((cx - px) * (ay - py) - (ax - px) * (cy - py)) * inv_area;
                    double w2 = 1.0 - w0 - w1;
                    if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                    const double inv_z =
                        w0 * st.v[0].inv_z + w1 * st.v[1].inv_z + w2 * st.v[2].inv_z;
                    const Vec3 world = (st.v[0].world_over_z * w0 + st.v[1].world_over_z * w1 +
                                        st.v[2].world_over_z * w2) /
                                       inv_z;
                    const double dist = length(world - camera.position);
                    double& zref = out.depth.at(x, y);
                    if (dist >= zref) continue;
                    const Vec3 n = (st.v[0].normal_over_z * w0 + st.v[1].normal_over_z * w1 +
                                    st.v[2].normal_over_z * w2) /
                                   inv_z;
                    const Vec3 col = (st.v[0].color_over_z * w0 + st.v[1].color_over_z * w1 +
                                      st.v[2].color_over_z * w2) /
                                     inv_z;
                    const double f = shade_factor(n, light);
                    zref = dist;
                    float* dst = out.color.at(x, y);
                    dst[0] = static_cast<float>(std::clamp(col.x * f, 0.0, 1.0));
                    dst[1] = static_cast<float>(std::clamp(col.y * f, 0.0, 1.0));
                    dst[2] = static_cast<float>(std::clamp(col.z * f, 0.0, 1.0));
                }
            }
        }
    });
    return out;
}

DepthDistanceBuffer warp_depth(const DepthDistanceBuffer& depth, const WarpMap& map) {
    const int w = map.wrapped_width(), h = map.wrapped_height();
    if (map.variant() == WarpMap::Variant::identity && w == depth.width &&
        h == depth.height)
        return depth;

    DepthDistanceBuffer out(w, h);
    const int W = depth.width, H = depth.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // forward-map the texel's corners into display space and
            // take the min distance over the covered pixel rectangle
            double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
            for (int corner = 0; corner < 4; ++corner) {
                const Vec2 p{(x + (corner & 1 ? 1.0 : 0.0)) / w,
                             (y + (corner & 2 ? 1.0 : 0.0)) / h};
                const Vec2 q = map.forward(p);
                u0 = std::min(u0, q.x);
                u1 = std::max(u1, q.x);
                v0 = std::min(v0, q.y);
                v1 = std::max(v1, q.y);
            }
            int ix0 = std::clamp(static_cast<int>(std::floor(u0 * W - 0.5)), 0, W - 1);
            int ix1 = std::clamp(static_cast<int>(std::ceil(u1 * W - 0.5)), 0, W - 1);
            int iy0 = std::clamp(static_cast<int>(std::floor(v0 * H - 0.5)), 0, H - 1);
            int iy1 = std::clamp(static_cast<int>(std::ceil(v1 * H - 0.5)), 0, H - 1);
            double m = std::numeric_limits<double>::infinity();
            for (int j = iy0; j <= iy1; ++j)
                for (int i = ix0; i <= ix1; ++i) m = std::min(m, depth.at(i, j));
            out.at(x, y) = m;
        }
    return out;
}

Image3f composite(const Image4f& volume_layer, const Image3f& scene) {
    if (volume_layer.width != scene.width || volume_layer.height != scene.height)
        throw Error("composite: size mismatch");
    Image3f out(scene.width, scene.height);
    for (int y = 0; y < scene.height; ++y)
        for (int x = 0; x < scene.width; ++x) {
            const float* v = volume_layer.at(x, y);
            const float* s = scene.at(x, y);
            float* d = out.at(x, y);
            for (int c = 0; c < 3; ++c)
                d[c] = std::clamp(v[c] + s[c] * (1.f - v[3]), 0.f, 1.f);
        }
    return out;
}

RasterOutput merge_by_depth(const RasterOutput& a, const RasterOutput& b) {
    if (a.color.width != b.color.width || a.color.height != b.color.height)
        throw Error("merge: size mismatch");
    RasterOutput out = a;
    for (int y = 0; y < a.color.height; ++y)
        for (int x = 0; x < a.color.width; ++x)
            if (b.depth.at(x, y) < out.depth.at(x, y)) {
                out.depth.at(x, y) = b.depth.at(x, y);
                const float* src = b.color.at(x, y);
                float* dst = out.color.at(x, y);
                for (int c = 0; c < 3; ++c) dst[c] = src[c];
            }
    return out;
}

}  // namespace voxcast
