#pragma once

#include <cstdint>
#include <vector>

#include "voxcast/block_cache.hpp"
#include "voxcast/camera.hpp"
#include "voxcast/container.hpp"

namespace voxcast {

struct OctreeNode {
    std::uint32_t level = 0;
    std::array<std::uint32_t, 3> coords{};
};

struct ScheduledBlock {
    CacheKey key;
    AABB box;
};

/// Front-to-back block list for one frame plus the keys that were
/// wanted but not resident (the coarser parent stands in for those).
struct RenderSchedule {
    std::vector<ScheduledBlock> blocks;
    std::vector<CacheKey> requests;
    std::uint64_t nodes_visited = 0;
};

/// World box of a block, clipped to the volume bounds. The unclipped
/// boxes of the 8 children partition the parent exactly; clipping
/// preserves that on the nonempty cells.
AABB block_world_box(const VolumeMeta& meta, std::uint32_t level,
                     const std::array<std::uint32_t, 3>& coords);

OctreeNode octree_root(const VolumeMeta& meta);

/// True when the node's voxels are fine enough for the camera: voxel
/// edge length over distance-to-closest-point is at most quality_k
/// pixel angles. A camera inside the box always wants refinement
/// unless the node is already finest.
bool lod_sufficient(const VolumeMeta& meta, const OctreeNode& node, const Camera& camera,
                    double quality_k);

/// Recursive traversal: frustum-culls, emits nodes whose resolution
/// suffices, descends front to back (camera-octant XOR order), and
/// falls back to the coarser node when a needed child block is not in
/// the render cache (the missing children are requested).
RenderSchedule traverse(const VolumeMeta& meta, const Camera& camera, BlockCache& render_cache,
                        double quality_k);

}  // namespace voxcast
