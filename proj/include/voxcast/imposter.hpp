#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxcast/camera.hpp"
#include "voxcast/geometry.hpp"
#include "voxcast/mesh.hpp"

namespace voxcast {

struct SphereGuide {
    Vec3 center;
    double radius = 1.0;
    Vec3 color{1, 1, 1};
};

/// Tangent ("round") cone: the envelope of spheres interpolating
/// (a, ra) -> (b, rb). End caps belong to the endpoint spheres.
struct ConeGuide {
    Vec3 a, b;
    double ra = 1.0, rb = 1.0;
    Vec3 color{1, 1, 1};
};

struct GuideSet {
    std::vector<SphereGuide> spheres;
    std::vector<ConeGuide> cones;
};

// --- SWC skeletons -----------------------------------------------------

struct SWCNode {
    std::int64_t id = 0;
    int type = 0;
    Vec3 pos;
    double radius = 1.0;
    std::int64_t parent = -1;
};

/// One node per line: id type x y z radius parent; '#' comments.
/// Malformed input throws FormatError with a 1-based line number.
std::vector<SWCNode> parse_swc(const std::string& text);
std::string serialize_swc(const std::vector<SWCNode>& nodes);

using SwcTypePalette = std::map<int, Vec3>;
SwcTypePalette default_swc_palette();

/// Spheres for nodes, tangent cones for (child, parent) edges. Edges
/// where one end sphere swallows the other produce no cone.
GuideSet guides_from_swc(const std::vector<SWCNode>& nodes,
                         const SwcTypePalette& palette = default_swc_palette());

// --- imposter geometry --------------------------------------------------

/// Camera-facing proxy quad for a sphere: plane through the center
/// perpendicular to the view axis, half extent r*d/sqrt(d^2 - r^2)
/// so the projection bounds the silhouette exactly. Cameras inside
/// the sphere get the full-screen fallback.
struct ImposterQuad {
    std::array<Vec3, 4> corners{};
    bool full_screen = false;
};

ImposterQuad quad_for_sphere(const Camera& camera, const SphereGuide& sphere);

/// Screen-space pixel rectangle to test for a primitive (inclusive).
struct ScreenRect {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // empty when x1 < x0

    bool empty() const { return x1 < x0 || y1 < y0; }
    std::uint64_t area() const {
        return empty() ? 0
                       : static_cast<std::uint64_t>(x1 - x0 + 1) *
                             static_cast<std::uint64_t>(y1 - y0 + 1);
    }
};

ScreenRect project_quad(const Camera& camera, const ImposterQuad& quad);

/// Cone cage: the end spheres' quads give an 8-corner cage whose
/// screen hull is contracted to the bounding rectangle of the union
/// of the silhouettes of the interpolated spheres (so midsections
/// nearer the camera than either end stay covered).
ScreenRect cage_for_cone(const Camera& camera, const ConeGuide& cone);

// --- analytic intersections ----------------------------------------------

struct SurfaceHit {
    double t = 0.0;
    Vec3 normal;
};

/// Nearest positive root; ray direction must be unit length.
std::optional<SurfaceHit> intersect_sphere(const Ray& ray, const SphereGuide& sphere);

/// Lateral surface of the tangent cone only; hits beyond the
/// tangency parameter range are rejected (the endpoint spheres own
/// the caps).
std::optional<SurfaceHit> intersect_cone(const Ray& ray, const ConeGuide& cone);

/// Per-pixel ray casting restricted to each guide's quad/cage bounds,
/// Lambert-shaded with the analytic normal and depth-tested, so the
/// output drops straight into mesh/volume compositing.
RasterOutput render_annotations(const GuideSet& guides, const Camera& camera, int width,
                                int height, const DirectionalLight& light = {},
                                int threads = 1, std::uint64_t* pixels_tested = nullptr);

}  // namespace voxcast
