#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxcast/camera.hpp"
#include "voxcast/geometry.hpp"
#include "voxcast/image.hpp"
#include "voxcast/warp.hpp"

namespace voxcast {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;  // per vertex, unit length
    std::vector<Vec3> colors;   // per vertex RGB
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// OBJ subset: v / vn / f records (f with v, v//vn or v/vt/vn indices,
/// fan-triangulated). Vertex normals are accumulated from faces when
/// the file has none.
TriangleMesh load_obj(const std::string& path, const Vec3& color = {0.8, 0.8, 0.8});

struct DirectionalLight {
    Vec3 dir{-0.4, -0.8, -0.45};  // direction the light travels
    double intensity = 1.0;
    double ambient = 0.2;
};

struct RasterOutput {
    Image3f color;
    DepthDistanceBuffer depth;
};

/// Perspective-correct software rasterization with a nearest-fragment
/// z-test. The depth buffer stores the Euclidean camera distance of
/// the fragment, not device depth. Lambert shading from interpolated
/// vertex normals.
RasterOutput rasterize(const TriangleMesh& mesh, const Camera& camera, int width, int height,
                       const DirectionalLight& light = {}, int threads = 1);

/// Resamples a display-space distance buffer into wrapped space,
/// taking the minimum distance over each wrapped texel's display
/// footprint (conservative for ray termination).
DepthDistanceBuffer warp_depth(const DepthDistanceBuffer& depth, const WarpMap& map);

/// Premultiplied-alpha blend of the volume layer over the scene:
/// out = vol_rgb + scene_rgb * (1 - vol_a), clamped to [0,1].
Image3f composite(const Image4f& volume_layer, const Image3f& scene);

/// Merge two opaque raster layers by depth (used to combine mesh and
/// annotation passes before compositing the volume on top).
RasterOutput merge_by_depth(const RasterOutput& a, const RasterOutput& b);

}  // namespace voxcast
