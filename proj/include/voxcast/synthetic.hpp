#pragma once

#include <cstdint>

#include "voxcast/container.hpp"

namespace voxcast {

/// Smooth sum-of-Gaussian-blobs test volume, deterministic per seed.
/// Values span the full 8-bit range; sparse enough to compress well.
Volume synth_blob_volume(std::array<std::uint32_t, 3> dims, std::uint32_t seed = 1,
                         int blob_count = 24);

/// Uniform random voxels (incompressible reference for benchmarks).
Volume synth_noise_volume(std::array<std::uint32_t, 3> dims, std::uint32_t seed = 1);

}  // namespace voxcast
