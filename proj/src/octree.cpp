#include "voxcast/octree.hpp"

#include <algorithm>

#include "voxcast/error.hpp"

namespace voxcast {

AABB block_world_box(const VolumeMeta& meta, std::uint32_t level,
                     const std::array<std::uint32_t, 3>& coords) {
    const double scale = static_cast<double>(1u << level);
    Vec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
        const double world_block = meta.block_size * scale * meta.voxel_spacing[a];
        lo[a] = coords[a] * world_block;
        hi[a] = lo[a] + world_block;
    }
    return AABB{lo, hi}.intersection(meta.world_bounds());
}

OctreeNode octree_root(const VolumeMeta& meta) {
    return OctreeNode{meta.level_count - 1, {0, 0, 0}};
}

bool lod_sufficient(const VolumeMeta& meta, const OctreeNode& node, const Camera& camera,
                    double quality_k) {
    if (node.level == 0) return true;
    const AABB box = block_world_box(meta, node.level, node.coords);
    if (box.contains(camera.position)) return false;
    const double dist = length(camera.position - box.closest_point(camera.position));
    if (dist <= 0.0) return false;
    const double spacing =
        std::max({meta.voxel_spacing[0], meta.voxel_spacing[1], meta.voxel_spacing[2]});
    const double voxel_edge = spacing * static_cast<double>(1u << node.level);
    return voxel_edge / dist <= quality_k * camera.pixel_angle();
}

namespace {

struct Traversal {
    const VolumeMeta& meta;
    const Camera& camera;
    BlockCache& cache;
    double quality_k;
    RenderSchedule sched;

    void emit(const OctreeNode& node, const AABB& box) {
        const CacheKey key{node.level, node.coords};
        sched.blocks.push_back({key, box});
        if (!cache.get(key))  // get() also queues the request internally
            sched.requests.push_back(key);
    }

    // children of (level, c) at level-1, masked by the child grid
    std::vector<OctreeNode> existing_children(const OctreeNode& node) const {
        std::vector<OctreeNode> out;
        const auto grid = meta.level_grid(node.level - 1);
        for (int idx = 0; idx < 8; ++idx) {
            const std::array<std::uint32_t, 3> cc{node.coords[0] * 2 + ((idx >> 0) & 1),
                                                  node.coords[1] * 2 + ((idx >> 1) & 1),
                                                  node.coords[2] * 2 + ((idx >> 2) & 1)};
            if (cc[0] < grid[0] && cc[1] < grid[1] && cc[2] < grid[2])
                out.push_back({node.level - 1, cc});
        }
        return out;
    }

    void visit(const OctreeNode& node) {
        ++sched.nodes_visited;
        const AABB box = block_world_box(meta, node.level, node.coords);
        if (box.empty() || !frustum_cull_keep(box, camera)) return;
        if (node.level == 0 || lod_sufficient(meta, node, camera, quality_k)) {
            emit(node, box);
            return;
        }

        const auto children = existing_children(node);
        std::vector<const OctreeNode*> needed;
        bool missing = false;
        for (const OctreeNode& child : children) {
            const AABB cbox = block_world_box(meta, child.level, child.coords);
            if (cbox.empty() || !frustum_cull_keep(cbox, camera)) continue;
            needed.push_back(&child);
            const CacheKey key{child.level, child.coords};
            if (!cache.contains(key)) {
                missing = true;
                cache.request(key);
                sched.requests.push_back(key);
            }
        }
        if (missing || needed.empty()) {
            // one level above resolution stands in until the children
            // are loaded
            emit(node, box);
            return;
        }

        // front to back: the child octant holding the camera first,
        // then XOR pattern order (subset order along each axis)
        const Vec3 center = box.center();
        const int cam_octant = (camera.position.x > center.x ? 1 : 0) |
                               (camera.position.y > center.y ? 2 : 0) |
                               (camera.position.z > center.z ? 4 : 0);
        for (int i = 0; i < 8; ++i) {
            const int octant = cam_octant ^ i;
            const std::array<std::uint32_t, 3> cc{node.coords[0] * 2 + ((octant >> 0) & 1),
                                                  node.coords[1] * 2 + ((octant >> 1) & 1),
                                                  node.coords[2] * 2 + ((octant >> 2) & 1)};
            for (const OctreeNode* child : needed)
                if (child->coords == cc) {
                    visit(*child);
                    break;
                }
        }
    }
};

}  // namespace

RenderSchedule traverse(const VolumeMeta& meta, const Camera& camera, BlockCache& render_cache,
                        double quality_k) {
    Traversal t{meta, camera, render_cache, quality_k, {}};
    t.visit(octree_root(meta));
    return std::move(t.sched);
}

}  // namespace voxcast
