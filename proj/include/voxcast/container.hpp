#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "voxcast/geometry.hpp"

namespace voxcast {

/// Geometry and encoding of one volumetric dataset. Serialized into
/// the container prologue with fixed-width little-endian fields.
struct VolumeMeta {
    std::array<std::uint32_t, 3> dims{};            // voxel counts x, y, z
    std::uint16_t channels = 1;                     // 1..4
    std::uint16_t bits_per_channel = 8;             // 8 or 16
    std::array<double, 3> voxel_spacing{1, 1, 1};   // micrometers
    std::uint32_t block_size = 32;                  // power of two, >= 8
    std::uint32_t level_count = 1;

    std::uint32_t bytes_per_channel() const { return bits_per_channel / 8; }
    std::size_t block_bytes() const {
        return static_cast<std::size_t>(block_size) * block_size * block_size * channels *
               bytes_per_channel();
    }
    std::array<std::uint32_t, 3> level_dims(std::uint32_t level) const;
    std::array<std::uint32_t, 3> level_grid(std::uint32_t level) const;  // blocks per axis
    AABB world_bounds() const;

    /// Smallest pyramid with the top level in a single block.
    static std::uint32_t required_level_count(const std::array<std::uint32_t, 3>& dims,
                                              std::uint32_t block_size);
};

/// require_pyramid distinguishes volume containers (full pyramid) from
/// movie containers (level 0 only).
void validate_meta(const VolumeMeta& meta, bool require_pyramid = true);

/// One decoded block: block_size^3 voxels, x fastest, then y, then z,
/// channels interleaved. Boundary blocks are zero-padded, so the byte
/// length is the same for every block of a container.
struct Block {
    std::uint32_t level = 0;
    std::array<std::uint32_t, 3> coords{};
    std::vector<std::uint8_t> voxels;
};

struct ChunkAddress {
    std::uint32_t frame = 0;  // always 0 in version-1 containers
    std::uint32_t level = 0;
    std::array<std::uint32_t, 3> coords{};

    auto operator<=>(const ChunkAddress&) const = default;
};

struct ChunkIndex {
    std::map<ChunkAddress, std::uint64_t> entries;  // -> file offset of chunk record

    bool contains(const ChunkAddress& a) const { return entries.count(a) != 0; }
};

struct ScanResult {
    ChunkIndex index;
    std::uint64_t resume_point = 0;  // offset just past the last complete chunk
    bool finished = false;           // footer present and valid
};

/// Dense in-memory volume, same layout contract as Block but with the
/// true (unpadded) dimensions.
struct Volume {
    std::array<std::uint32_t, 3> dims{};
    std::uint16_t channels = 1;
    std::uint16_t bits_per_channel = 8;
    std::vector<std::uint8_t> data;

    static Volume zeros(std::array<std::uint32_t, 3> dims, std::uint16_t channels = 1,
                        std::uint16_t bits = 8);
    std::size_t sample_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * channels;
    }
    std::uint32_t value_at(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                           std::uint32_t c = 0) const;
    void set_value(std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t c,
                   std::uint32_t v);
};

/// 2x2x2 arithmetic mean with round-half-up; out-of-range children
/// count as zero, matching the zero-padding of boundary blocks.
Volume downsample_half(const Volume& v);

// --- container file --------------------------------------------------
//
// magic "SYGC" | version u16 | meta | chunk records... |
// footer entries | footer offset u64 | footer magic "SYGX"
//
// v1 chunk record: level u8, i u32, j u32, k u32, compressed u32,
// uncompressed u32, crc32 u32, payload, complete flag 0xA5.
// v2 (movie) records and footer entries carry a leading frame u32.

constexpr std::uint16_t kContainerVersionVolume = 1;
constexpr std::uint16_t kContainerVersionMovie = 2;

/// Read side. Safe for concurrent read_chunk calls from multiple
/// threads (positional reads on one descriptor, no shared cursor).
class ContainerReader {
  public:
    ContainerReader(std::string path, std::uint16_t expect_version = kContainerVersionVolume);
    ~ContainerReader();
    ContainerReader(const ContainerReader&) = delete;
    ContainerReader& operator=(const ContainerReader&) = delete;

    const VolumeMeta& meta() const { return meta_; }
    std::uint16_t version() const { return version_; }
    const ChunkIndex& index() const { return index_; }
    std::uint32_t frame_count() const { return frame_count_; }

    Block read_chunk(std::uint32_t level, std::array<std::uint32_t, 3> coords,
                     std::uint32_t frame = 0) const;

  private:
    std::string path_;
    int fd_ = -1;
    std::uint16_t version_ = 0;
    VolumeMeta meta_;
    ChunkIndex index_;
    std::uint32_t frame_count_ = 0;
};

using ContainerHandle = std::shared_ptr<ContainerReader>;

ContainerHandle open_container(const std::string& path);

/// Scans a (possibly unfinished) container, collecting every complete,
/// checksum-valid chunk. Trailing bytes of a partially written chunk
/// are not part of the result; resume_point marks where appending may
/// continue. A complete-flagged chunk with a bad checksum is real
/// corruption and throws.
ScanResult resume_scan(const std::string& path, std::uint16_t expect_version,
                       const VolumeMeta* expect_meta = nullptr);

struct ImportProgress {
    std::uint64_t chunks_written = 0;
    std::uint64_t chunks_total = 0;
};
using ProgressFn = std::function<void(const ImportProgress&)>;

/// Builds the full pyramid from a dense level-0 volume and appends the
/// chunks in canonical order (level 0 first, z-major, then coarser
/// levels). Resumes an interrupted import; a finished container is a
/// no-op. The final file is byte-identical regardless of interruptions.
///
/// `stop_after_chunks`: for tests, abandons the import after appending
/// that many chunks in this call (simulates a killed process).
void import_volume(const Volume& volume, const VolumeMeta& meta, const std::string& out_path,
                   const ProgressFn& progress = {}, std::int64_t stop_after_chunks = -1);

/// Slice-stack import: a directory of PNG/PGM/PPM slices plus a
/// key=value metadata file (dims, spacing, channels, block_size,
/// optional bits).
struct SliceStack {
    std::string directory;
    std::string meta_file;  // default: <directory>/stack.meta
};

VolumeMeta read_stack_meta(const SliceStack& stack);
Volume load_slice_stack(const SliceStack& stack, const VolumeMeta& meta);
ContainerHandle import_stack(const SliceStack& stack, const std::string& out_path,
                             const ProgressFn& progress = {});

/// Extract one padded block out of a dense volume (zero fill outside).
Block extract_block(const Volume& v, const VolumeMeta& meta, std::uint32_t level,
                    std::array<std::uint32_t, 3> coords);

/// Canonical append order for one frame/volume: level 0 first, blocks
/// z-major (z outer, then y, then x), then coarser levels.
std::vector<ChunkAddress> canonical_chunk_order(const VolumeMeta& meta, std::uint32_t frame = 0);

}  // namespace voxcast
