#include "voxcast/movie.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>

#include "container_format.hpp"
#include "voxcast/error.hpp"
#include "voxcast/threading.hpp"

namespace fs = std::filesystem;

namespace voxcast {

using namespace detail;

VolumeMeta make_movie_meta(std::array<std::uint32_t, 3> dims, std::uint16_t channels,
                           std::uint16_t bits, std::array<double, 3> spacing,
                           std::uint32_t block_size) {
    VolumeMeta meta;
    meta.dims = dims;
    meta.channels = channels;
    meta.bits_per_channel = bits;
    meta.voxel_spacing = spacing;
    meta.block_size = block_size;
    meta.level_count = 1;  // frames are whole-resolution
    validate_meta(meta, /*require_pyramid=*/false);
    return meta;
}

void movie_append_frame(const std::string& path, const Volume& frame, const VolumeMeta& meta,
                        std::int64_t stop_after_chunks) {
    validate_meta(meta, /*require_pyramid=*/false);
    if (meta.level_count != 1) throw FormatError("movie meta must have level_count 1");
    if (frame.dims != meta.dims || frame.channels != meta.channels ||
        frame.bits_per_channel != meta.bits_per_channel)
        throw FormatError("frame does not match movie metadata (dims/channels/bits)");

    ScanResult scan = detail::prepare_append(path, kContainerVersionMovie, meta);
    if (scan.finished) {
        // drop the footer; it is regenerated after the append
        fs::resize_file(path, scan.resume_point);
    }

    std::vector<std::pair<ChunkAddress, std::uint64_t>> entries(scan.index.entries.begin(),
                                                                scan.index.entries.end());
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });

    const std::size_t per_frame = canonical_chunk_order(meta, 0).size();
    const std::uint32_t complete_frames =
        static_cast<std::uint32_t>(entries.size() / per_frame);
    const std::size_t partial = entries.size() % per_frame;
    // the chunks on disk must be whole frames followed by a canonical
    // prefix of the frame being appended
    const std::uint32_t frame_id = complete_frames;
    std::size_t cursor = 0;
    for (std::uint32_t f = 0; f <= frame_id && cursor < entries.size(); ++f) {
        const auto order = canonical_chunk_order(meta, f);
        for (std::size_t i = 0; i < order.size() && cursor < entries.size(); ++i, ++cursor)
            if (entries[cursor].first != order[i])
                throw CorruptionError("movie chunk order does not match appender: " + path);
    }

    const auto order = canonical_chunk_order(meta, frame_id);
    std::uint64_t pos = scan.resume_point;
    std::int64_t appended = 0;
    {
        AppendFileHandle out(path);
        for (std::size_t i = partial; i < order.size(); ++i) {
            if (stop_after_chunks >= 0 && appended >= stop_after_chunks) return;
            const Block b = extract_block(frame, meta, 0, order[i].coords);
            const auto record = detail::encode_chunk_record(kContainerVersionMovie, order[i],
                                                            b.voxels.data(), b.voxels.size());
            out.write(record);
            entries.emplace_back(order[i], pos);
            pos += record.size();
            ++appended;
        }
    }
    detail::write_footer(path, kContainerVersionMovie, entries, pos);
}

ContainerHandle open_movie(const std::string& path) {
    return std::make_shared<ContainerReader>(path, kContainerVersionMovie);
}

Volume decode_frame(const ContainerReader& movie, std::uint32_t frame_index,
                    int decode_workers) {
    if (frame_index >= movie.frame_count())
        throw Error("frame " + std::to_string(frame_index) + " out of range (movie has " +
                    std::to_string(movie.frame_count()) + ")");
    const VolumeMeta& meta = movie.meta();
    Volume out = Volume::zeros(meta.dims, meta.channels, meta.bits_per_channel);
    const auto order = canonical_chunk_order(meta, frame_index);
    const std::uint32_t bs = meta.block_size;
    const std::uint32_t bpc = meta.bytes_per_channel();
    parallel_for(static_cast<std::int64_t>(order.size()), decode_workers,
                 [&](std::int64_t b0, std::int64_t b1) {
                     for (std::int64_t bi = b0; bi < b1; ++bi) {
                         const ChunkAddress& addr = order[static_cast<std::size_t>(bi)];
                         const Block block =
                             movie.read_chunk(0, addr.coords, frame_index);
                         // paste the unpadded region back into the frame
                         const std::uint32_t x0 = addr.coords[0] * bs;
                         const std::uint32_t y0 = addr.coords[1] * bs;
                         const std::uint32_t z0 = addr.coords[2] * bs;
                         const std::uint32_t nx = std::min(bs, meta.dims[0] - x0);
                         const std::uint32_t ny = std::min(bs, meta.dims[1] - y0);
                         const std::uint32_t nz = std::min(bs, meta.dims[2] - z0);
                         const std::size_t row = static_cast<std::size_t>(nx) * meta.channels * bpc;
                         for (std::uint32_t z = 0; z < nz; ++z)
                             for (std::uint32_t y = 0; y < ny; ++y) {
                                 const std::size_t src =
                                     ((static_cast<std::size_t>(z) * bs + y) * bs) *
                                     meta.channels * bpc;
                                 const std::size_t dst =
                                     ((static_cast<std::size_t>(z0 + z) * meta.dims[1] +
                                       (y0 + y)) *
                                          meta.dims[0] +
                                      x0) *
                                     meta.channels * bpc;
                                 std::memcpy(&out.data[dst], &block.voxels[src], row);
                             }
                     }
                 });
    return out;
}

PlaybackStats bench_playback(const ContainerReader& movie, double seconds,
                             int decode_workers) {
    if (movie.frame_count() == 0) throw Error("bench: movie has no frames");
    PlaybackStats stats;
    stats.decode_workers = decode_workers;
    const std::size_t frame_bytes = static_cast<std::size_t>(movie.meta().dims[0]) *
                                    movie.meta().dims[1] * movie.meta().dims[2] *
                                    movie.meta().channels * movie.meta().bytes_per_channel();
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t decoded_bytes = 0;
    for (;;) {
        const std::uint32_t i =
            static_cast<std::uint32_t>(stats.frames_decoded % movie.frame_count());
        const Volume v = decode_frame(movie, i, decode_workers);
        decoded_bytes += frame_bytes;
        ++stats.frames_decoded;
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed >= seconds && stats.frames_decoded >= 1) {
            stats.wall_seconds = elapsed;
            break;
        }
    }
    stats.frames_per_second = stats.frames_decoded / stats.wall_seconds;
    stats.decompressed_bytes_per_second = decoded_bytes / stats.wall_seconds;
    return stats;
}

}  // namespace voxcast
