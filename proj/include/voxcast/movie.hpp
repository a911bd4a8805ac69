#pragma once

#include <cstdint>
#include <string>

#include "voxcast/container.hpp"

namespace voxcast {

/// Movie containers reuse the volume container layout at version 2:
/// chunk headers and footer entries carry a leading frame id, frames
/// are stored at full resolution (level 0 only) and share one
/// VolumeMeta. Appends are resumable exactly like volume imports.
VolumeMeta make_movie_meta(std::array<std::uint32_t, 3> dims, std::uint16_t channels,
                           std::uint16_t bits, std::array<double, 3> spacing,
                           std::uint32_t block_size);

/// Appends one frame (or resumes a partially appended one). The frame
/// id is the current complete-frame count.
void movie_append_frame(const std::string& path, const Volume& frame, const VolumeMeta& meta,
                        std::int64_t stop_after_chunks = -1);

ContainerHandle open_movie(const std::string& path);

/// Exact original voxels, contiguous layout. decode_workers > 1
/// decompresses the frame's chunks in parallel.
Volume decode_frame(const ContainerReader& movie, std::uint32_t frame_index,
                    int decode_workers = 1);

struct PlaybackStats {
    std::uint64_t frames_decoded = 0;
    double wall_seconds = 0.0;
    double frames_per_second = 0.0;
    double decompressed_bytes_per_second = 0.0;
    int decode_workers = 1;
};

/// Loops decode over the frames for at least `seconds` (at least one
/// frame). Decode throughput only; rendering is measured elsewhere.
PlaybackStats bench_playback(const ContainerReader& movie, double seconds,
                             int decode_workers = 1);

}  // namespace voxcast
