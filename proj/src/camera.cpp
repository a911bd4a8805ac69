#include "voxcast/camera.hpp"

#include <cmath>

#include "voxcast/error.hpp"

namespace voxcast {

Camera Camera::look_at(const Vec3& position, const Vec3& target, const Vec3& up_hint,
                       double vfov, int width, int height, double near_clip,
                       double far_clip) {
    if (!(near_clip > 0.0) || !(far_clip > near_clip))
        throw ConfigError("camera: need 0 < near < far");
    if (!(vfov > 0.0) || !(vfov < 3.14159265358979323846))
        throw ConfigError("camera: vfov out of range");
    if (width < 1 || height < 1) throw ConfigError("camera: image size must be >= 1");
    Camera cam;
    cam.position = position;
    cam.forward = normalized(target - position);
    if (length(cam.forward) == 0.0) throw ConfigError("camera: target equals position");
    cam.right = normalized(cross(cam.forward, up_hint));
    if (length(cam.right) == 0.0) {
        // up hint parallel to the view direction; pick something stable
        const Vec3 alt = std::abs(cam.forward.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        cam.right = normalized(cross(cam.forward, alt));
    }
    cam.up = cross(cam.right, cam.forward);
    cam.vfov = vfov;
    cam.width = width;
    cam.height = height;
    cam.near_clip = near_clip;
    cam.far_clip = far_clip;
    return cam;
}

Ray Camera::ray_through(double u, double v) const {
    const double th = std::tan(vfov * 0.5);
    const double x = (2.0 * u - 1.0) * th * aspect();
    const double y = (1.0 - 2.0 * v) * th;
    return {position, normalized(right * x + up * y + forward)};
}

std::array<Plane, 6> Camera::frustum_planes() const {
    std::array<Plane, 6> planes;
    // near and far
    planes[0] = {forward, -dot(forward, position + forward * near_clip)};
    planes[1] = {-forward, dot(forward, position + forward * far_clip)};
    // sides from the corner ray directions
    const Vec3 d00 = ray_through(0, 0).dir;  // top left
    const Vec3 d10 = ray_through(1, 0).dir;
    const Vec3 d01 = ray_through(0, 1).dir;
    const Vec3 d11 = ray_through(1, 1).dir;
    const std::array<std::pair<Vec3, Vec3>, 4> edges = {
        std::pair{d00, d01},  // left
        std::pair{d10, d11},  // right
        std::pair{d00, d10},  // top
        std::pair{d01, d11},  // bottom
    };
    for (int i = 0; i < 4; ++i) {
        Vec3 n = normalized(cross(edges[i].first, edges[i].second));
        if (dot(n, forward) < 0.0) n = -n;  // interior contains the view axis
        planes[2 + i] = {n, -dot(n, position)};
    }
    return planes;
}

bool frustum_cull_keep(const AABB& box, const Camera& camera) {
    const auto planes = camera.frustum_planes();
    for (const Plane& pl : planes) {
        // p-vertex: the corner furthest along the plane normal
        const Vec3 p{pl.n.x >= 0 ? box.hi.x : box.lo.x, pl.n.y >= 0 ? box.hi.y : box.lo.y,
                     pl.n.z >= 0 ? box.hi.z : box.lo.z};
        if (pl.signed_distance(p) < 0.0) return false;
    }
    return true;
}

}  // namespace voxcast
