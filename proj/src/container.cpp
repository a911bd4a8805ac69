#include "voxcast/container.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "container_format.hpp"
#include "voxcast/error.hpp"
#include "voxcast/image.hpp"
#include "voxcast/lz4_codec.hpp"

namespace fs = std::filesystem;

namespace voxcast {

using namespace detail;

// --- VolumeMeta -------------------------------------------------------

std::array<std::uint32_t, 3> VolumeMeta::level_dims(std::uint32_t level) const {
    std::array<std::uint32_t, 3> out{};
    for (int a = 0; a < 3; ++a)
        out[a] = std::max<std::uint32_t>(1, (dims[a] + ((1u << level) - 1)) >> level);
    return out;
}

std::array<std::uint32_t, 3> VolumeMeta::level_grid(std::uint32_t level) const {
    const auto ld = level_dims(level);
    std::array<std::uint32_t, 3> out{};
    for (int a = 0; a < 3; ++a) out[a] = (ld[a] + block_size - 1) / block_size;
    return out;
}

AABB VolumeMeta::world_bounds() const {
    return {Vec3{0, 0, 0},
            Vec3{dims[0] * voxel_spacing[0], dims[1] * voxel_spacing[1],
                 dims[2] * voxel_spacing[2]}};
}

std::uint32_t VolumeMeta::required_level_count(const std::array<std::uint32_t, 3>& dims,
                                               std::uint32_t block_size) {
    VolumeMeta probe;
    probe.dims = dims;
    probe.block_size = block_size;
    std::uint32_t level = 0;
    for (;;) {
        const auto g = probe.level_grid(level);
        if (g[0] == 1 && g[1] == 1 && g[2] == 1) return level + 1;
        ++level;
    }
}

void validate_meta(const VolumeMeta& meta, bool require_pyramid) {
    if (meta.dims[0] == 0 || meta.dims[1] == 0 || meta.dims[2] == 0)
        throw FormatError("meta: zero dimension");
    if (meta.channels < 1 || meta.channels > 4)
        throw FormatError("meta: channels must be 1..4");
    if (meta.bits_per_channel != 8 && meta.bits_per_channel != 16)
        throw FormatError("meta: bits_per_channel must be 8 or 16");
    for (double s : meta.voxel_spacing)
        if (!(s > 0.0)) throw FormatError("meta: voxel_spacing must be positive");
    if (meta.block_size < 8 || !std::has_single_bit(meta.block_size))
        throw FormatError("meta: block_size must be a power of two >= 8");
    if (require_pyramid) {
        const std::uint32_t need = VolumeMeta::required_level_count(meta.dims, meta.block_size);
        if (meta.level_count != need)
            throw FormatError("meta: level_count must be " + std::to_string(need));
    } else if (meta.level_count < 1) {
        throw FormatError("meta: level_count must be >= 1");
    }
}

// --- Volume -----------------------------------------------------------

Volume Volume::zeros(std::array<std::uint32_t, 3> dims, std::uint16_t channels,
                     std::uint16_t bits) {
    Volume v;
    v.dims = dims;
    v.channels = channels;
    v.bits_per_channel = bits;
    v.data.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * channels * (bits / 8),
                  0);
    return v;
}

std::uint32_t Volume::value_at(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                               std::uint32_t c) const {
    const std::size_t idx =
        ((static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x) * channels + c;
    if (bits_per_channel == 8) return data[idx];
    return static_cast<std::uint32_t>(data[idx * 2]) |
           (static_cast<std::uint32_t>(data[idx * 2 + 1]) << 8);
}

void Volume::set_value(std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t c,
                       std::uint32_t v) {
    const std::size_t idx =
        ((static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x) * channels + c;
    if (bits_per_channel == 8) {
        data[idx] = static_cast<std::uint8_t>(v);
    } else {
        data[idx * 2] = static_cast<std::uint8_t>(v & 0xff);
        data[idx * 2 + 1] = static_cast<std::uint8_t>(v >> 8);
    }
}

Volume downsample_half(const Volume& v) {
    std::array<std::uint32_t, 3> od{};
    for (int a = 0; a < 3; ++a) od[a] = std::max<std::uint32_t>(1, (v.dims[a] + 1) / 2);
    Volume out = Volume::zeros(od, v.channels, v.bits_per_channel);
    for (std::uint32_t z = 0; z < od[2]; ++z)
        for (std::uint32_t y = 0; y < od[1]; ++y)
            for (std::uint32_t x = 0; x < od[0]; ++x)
                for (std::uint32_t c = 0; c < v.channels; ++c) {
                    std::uint32_t sum = 0;
                    for (int dz = 0; dz < 2; ++dz)
                        for (int dy = 0; dy < 2; ++dy)
                            for (int dx = 0; dx < 2; ++dx) {
                                const std::uint32_t sx = 2 * x + dx, sy = 2 * y + dy,
                                                    sz = 2 * z + dz;
                                if (sx < v.dims[0] && sy < v.dims[1] && sz < v.dims[2])
                                    sum += v.value_at(sx, sy, sz, c);
                            }
                    out.set_value(x, y, z, c, (sum + 4) / 8);  // mean of 8, round half up
                }
    return out;
}

Block extract_block(const Volume& v, const VolumeMeta& meta, std::uint32_t level,
                    std::array<std::uint32_t, 3> coords) {
    const std::uint32_t bs = meta.block_size;
    const std::uint32_t bpc = meta.bytes_per_channel();
    Block b;
    b.level = level;
    b.coords = coords;
    b.voxels.assign(meta.block_bytes(), 0);
    const std::uint32_t x0 = coords[0] * bs, y0 = coords[1] * bs, z0 = coords[2] * bs;
    if (x0 >= v.dims[0] || y0 >= v.dims[1] || z0 >= v.dims[2]) return b;
    const std::uint32_t nx = std::min(bs, v.dims[0] - x0);
    const std::uint32_t ny = std::min(bs, v.dims[1] - y0);
    const std::uint32_t nz = std::min(bs, v.dims[2] - z0);
    const std::size_t row_bytes = static_cast<std::size_t>(nx) * v.channels * bpc;
    const std::size_t dst_row_stride = static_cast<std::size_t>(bs) * v.channels * bpc;
    for (std::uint32_t z = 0; z < nz; ++z)
        for (std::uint32_t y = 0; y < ny; ++y) {
            const std::size_t src =
                ((static_cast<std::size_t>(z0 + z) * v.dims[1] + (y0 + y)) * v.dims[0] + x0) *
                v.channels * bpc;
            std::memcpy(&b.voxels[(static_cast<std::size_t>(z) * bs + y) * dst_row_stride],
                        &v.data[src], row_bytes);
        }
    return b;
}

std::vector<ChunkAddress> canonical_chunk_order(const VolumeMeta& meta, std::uint32_t frame) {
    std::vector<ChunkAddress> order;
    for (std::uint32_t level = 0; level < meta.level_count; ++level) {
        const auto g = meta.level_grid(level);
        for (std::uint32_t k = 0; k < g[2]; ++k)
            for (std::uint32_t j = 0; j < g[1]; ++j)
                for (std::uint32_t i = 0; i < g[0]; ++i)
                    order.push_back({frame, level, {i, j, k}});
    }
    return order;
}

// --- scanning ---------------------------------------------------------

namespace {

std::uint64_t file_size_of(const std::string& path) {
    std::error_code ec;
    const auto n = fs::file_size(path, ec);
    if (ec) throw IoError("cannot stat: " + path);
    return n;
}

std::vector<std::uint8_t> read_range(std::ifstream& in, std::uint64_t off, std::size_t n) {
    std::vector<std::uint8_t> buf(n);
    in.seekg(static_cast<std::streamoff>(off));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n)) throw IoError("short read");
    return buf;
}

VolumeMeta parse_prologue(const std::uint8_t* bytes, std::uint16_t& version_out) {
    if (std::memcmp(bytes, kMagic, 4) != 0) throw FormatError("bad magic");
    ByteCursor c{bytes + 4, bytes + kPrologueSize};
    version_out = c.u16();
    VolumeMeta m;
    for (int a = 0; a < 3; ++a) m.dims[a] = c.u32();
    m.channels = c.u16();
    m.bits_per_channel = c.u16();
    for (int a = 0; a < 3; ++a) m.voxel_spacing[a] = c.f64();
    m.block_size = c.u32();
    m.level_count = c.u32();
    return m;
}

bool plausible_header(const RawChunkHeader& h, const VolumeMeta& meta, std::uint16_t version) {
    if (h.addr.level >= meta.level_count) return false;
    if (version == kContainerVersionMovie && h.addr.level != 0) return false;
    VolumeMeta probe = meta;
    const auto g = probe.level_grid(h.addr.level);
    for (int a = 0; a < 3; ++a)
        if (h.addr.coords[a] >= g[a]) return false;
    if (h.uncompressed_size != meta.block_bytes()) return false;
    if (h.compressed_size == 0 || h.compressed_size > lz4_bound(h.uncompressed_size))
        return false;
    return true;
}

// Validates and loads the footer of a finished container. Returns
// false when no (valid) footer is present and a forward scan is
// needed instead.
bool try_load_footer(std::ifstream& in, std::uint64_t size, std::uint16_t version,
                     const VolumeMeta& meta, ScanResult& out) {
    if (size < kPrologueSize + kTailSize) return false;
    const auto tail = read_range(in, size - kTailSize, kTailSize);
    if (std::memcmp(tail.data() + 8, kFooterMagic, 4) != 0) return false;
    ByteCursor tc{tail.data(), tail.data() + 8};
    const std::uint64_t footer_off = tc.u64();
    if (footer_off < kPrologueSize || footer_off > size - kTailSize) return false;
    const std::uint64_t footer_len = size - kTailSize - footer_off;
    const std::size_t esz = footer_entry_size(version);
    if (footer_len % esz != 0) return false;

    const auto bytes = read_range(in, footer_off, static_cast<std::size_t>(footer_len));
    ChunkIndex index;
    std::uint64_t prev_off = 0;
    const std::size_t hsz = chunk_header_size(version);
    for (std::size_t e = 0; e < footer_len / esz; ++e) {
        ByteCursor c{bytes.data() + e * esz, bytes.data() + (e + 1) * esz};
        ChunkAddress addr;
        if (version == kContainerVersionMovie) addr.frame = c.u32();
        addr.level = c.u8();
        for (int a = 0; a < 3; ++a) addr.coords[a] = c.u32();
        const std::uint64_t off = c.u64();
        if (off < kPrologueSize || off >= footer_off) return false;
        if (e > 0 && off <= prev_off) return false;  // strictly increasing append order
        prev_off = off;
        // cheap structural check: header matches the entry and the
        // complete flag byte is in place
        const auto hb = read_range(in, off, hsz);
        const RawChunkHeader h = decode_chunk_header(version, hb.data());
        if (h.addr != addr || !plausible_header(h, meta, version)) return false;
        const auto flag = read_range(in, off + hsz + h.compressed_size, 1);
        if (flag[0] != kCompleteFlag) return false;
        if (!index.entries.emplace(addr, off).second) return false;
    }
    out.index = std::move(index);
    out.resume_point = footer_off;
    out.finished = true;
    return true;
}

}  // namespace

ScanResult resume_scan(const std::string& path, std::uint16_t expect_version,
                       const VolumeMeta* expect_meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const std::uint64_t size = file_size_of(path);
    if (size < kPrologueSize) throw FormatError("truncated container prologue: " + path);

    const auto pro = read_range(in, 0, kPrologueSize);
    std::uint16_t version = 0;
    const VolumeMeta meta = parse_prologue(pro.data(), version);
    if (version != expect_version)
        throw FormatError("container version " + std::to_string(version) + ", expected " +
                          std::to_string(expect_version));
    validate_meta(meta, /*require_pyramid=*/version == kContainerVersionVolume);
    if (expect_meta) {
        const auto expected = make_prologue(version, *expect_meta);
        if (std::memcmp(expected.data(), pro.data(), kPrologueSize) != 0)
            throw FormatError("container metadata does not match import parameters: " + path);
    }

    ScanResult result;
    if (try_load_footer(in, size, version, meta, result)) return result;

    const std::size_t hsz = chunk_header_size(version);
    std::uint64_t pos = kPrologueSize;
    for (;;) {
        if (pos + hsz > size) break;
        const auto hb = read_range(in, pos, hsz);
        const RawChunkHeader h = decode_chunk_header(version, hb.data());
        if (!plausible_header(h, meta, version)) break;
        const std::uint64_t record_end = pos + hsz + h.compressed_size + 1;
        if (record_end > size) break;
        const auto payload = read_range(in, pos + hsz, h.compressed_size);
        const auto flag = read_range(in, pos + hsz + h.compressed_size, 1);
        if (flag[0] != kCompleteFlag) break;
        if (crc32_of(payload.data(), payload.size()) != h.crc32)
            throw CorruptionError("checksum mismatch on complete chunk at offset " +
                                  std::to_string(pos) + " in " + path);
        if (!result.index.entries.emplace(h.addr, pos).second)
            throw CorruptionError("duplicate chunk in " + path);
        pos = record_end;
    }
    result.resume_point = pos;
    result.finished = false;
    return result;
}

// --- reader -----------------------------------------------------------

ContainerReader::ContainerReader(std::string path, std::uint16_t expect_version)
    : path_(std::move(path)) {
    ScanResult scan = resume_scan(path_, expect_version);
    if (!scan.finished)
        throw FormatError("container is unfinished (no footer); rerun import: " + path_);
    index_ = std::move(scan.index);

    std::ifstream in(path_, std::ios::binary);
    const auto pro = read_range(in, 0, kPrologueSize);
    meta_ = parse_prologue(pro.data(), version_);

    if (version_ == kContainerVersionMovie) {
        // frames must be dense 0..n-1 and complete
        std::uint32_t max_frame = 0;
        bool any = false;
        for (const auto& [addr, off] : index_.entries) {
            max_frame = std::max(max_frame, addr.frame);
            any = true;
        }
        frame_count_ = any ? max_frame + 1 : 0;
        const auto per_frame = canonical_chunk_order(meta_, 0).size();
        if (index_.entries.size() != per_frame * frame_count_)
            throw CorruptionError("movie container has incomplete frames: " + path_);
    } else {
        frame_count_ = 1;
    }

    fd_ = ::open(path_.c_str(), O_RDONLY);
    if (fd_ < 0) throw IoError("cannot open: " + path_);
}

ContainerReader::~ContainerReader() {
    if (fd_ >= 0) ::close(fd_);
}

Block ContainerReader::read_chunk(std::uint32_t level, std::array<std::uint32_t, 3> coords,
                                  std::uint32_t frame) const {
    const ChunkAddress addr{frame, level, coords};
    const auto it = index_.entries.find(addr);
    if (it == index_.entries.end())
        throw Error("missing chunk (frame " + std::to_string(frame) + ", level " +
                    std::to_string(level) + ", " + std::to_string(coords[0]) + "," +
                    std::to_string(coords[1]) + "," + std::to_string(coords[2]) + ")");
    const std::size_t hsz = chunk_header_size(version_);
    std::vector<std::uint8_t> hb(hsz);
    if (::pread(fd_, hb.data(), hsz, static_cast<off_t>(it->second)) !=
        static_cast<ssize_t>(hsz))
        throw IoError("short read in " + path_);
    const RawChunkHeader h = decode_chunk_header(version_, hb.data());
    if (h.addr != addr) throw CorruptionError("chunk header does not match index in " + path_);
    if (h.uncompressed_size != meta_.block_bytes())
        throw CorruptionError("chunk size mismatch in " + path_);
    std::vector<std::uint8_t> payload(h.compressed_size);
    if (::pread(fd_, payload.data(), payload.size(),
                static_cast<off_t>(it->second + hsz)) != static_cast<ssize_t>(payload.size()))
        throw IoError("short read in " + path_);
    if (crc32_of(payload.data(), payload.size()) != h.crc32)
        throw CorruptionError("checksum mismatch reading chunk in " + path_);
    Block b;
    b.level = level;
    b.coords = coords;
    b.voxels = lz4_decompress(payload.data(), payload.size(), h.uncompressed_size);
    return b;
}

ContainerHandle open_container(const std::string& path) {
    // accepts either version; movie access goes through MovieReader
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const auto pro = read_range(in, 0, kPrologueSize);
    std::uint16_t version = 0;
    parse_prologue(pro.data(), version);
    return std::make_shared<ContainerReader>(path, version);
}

// --- import -----------------------------------------------------------

namespace detail {

std::vector<std::uint8_t> encode_chunk_record(std::uint16_t version, const ChunkAddress& addr,
                                              const std::uint8_t* voxels, std::size_t nbytes) {
    auto payload = lz4_compress(voxels, nbytes);
    RawChunkHeader h;
    h.addr = addr;
    h.compressed_size = static_cast<std::uint32_t>(payload.size());
    h.uncompressed_size = static_cast<std::uint32_t>(nbytes);
    h.crc32 = crc32_of(payload.data(), payload.size());
    auto record = encode_chunk_header(version, h);
    record.insert(record.end(), payload.begin(), payload.end());
    record.push_back(kCompleteFlag);
    return record;
}

// Prepares a container file for appending: creates it (with prologue)
// if absent or shorter than the prologue, otherwise scans and
// truncates a trailing partial chunk. Returns the scan state after
// truncation.
ScanResult prepare_append(const std::string& path, std::uint16_t version,
                          const VolumeMeta& meta) {
    const auto prologue = make_prologue(version, meta);
    std::error_code ec;
    const bool exists = fs::exists(path, ec) && fs::file_size(path, ec) > 0;
    if (exists && fs::file_size(path, ec) >= kPrologueSize) {
        ScanResult scan = resume_scan(path, version, &meta);
        if (!scan.finished) fs::resize_file(path, scan.resume_point);
        return scan;
    }
    if (exists) {
        // shorter than the prologue: accept only a prefix of the
        // expected prologue, then start over
        std::ifstream in(path, std::ios::binary);
        const std::uint64_t n = fs::file_size(path, ec);
        std::vector<std::uint8_t> head(static_cast<std::size_t>(n));
        in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(n));
        if (std::memcmp(head.data(), prologue.data(), head.size()) != 0)
            throw FormatError("existing file is not a container: " + path);
        fs::resize_file(path, 0);
    }
    {
        AppendFileHandle out(path);
        out.write(prologue);
    }
    ScanResult scan;
    scan.resume_point = kPrologueSize;
    return scan;
}

void write_footer(const std::string& path, std::uint16_t version,
                  const std::vector<std::pair<ChunkAddress, std::uint64_t>>& entries,
                  std::uint64_t footer_offset) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(entries.size() * footer_entry_size(version) + kTailSize);
    for (const auto& [addr, off] : entries) encode_footer_entry(version, bytes, addr, off);
    put_u64(bytes, footer_offset);
    bytes.insert(bytes.end(), kFooterMagic, kFooterMagic + 4);
    AppendFileHandle out(path);
    out.write(bytes);
}

}  // namespace detail

void import_volume(const Volume& volume, const VolumeMeta& meta, const std::string& out_path,
                   const ProgressFn& progress, std::int64_t stop_after_chunks) {
    validate_meta(meta);
    if (volume.dims != meta.dims || volume.channels != meta.channels ||
        volume.bits_per_channel != meta.bits_per_channel)
        throw FormatError("volume does not match metadata (dims/channels/bits)");

    const auto order = canonical_chunk_order(meta);
    ScanResult scan = detail::prepare_append(out_path, kContainerVersionVolume, meta);
    if (scan.finished) {
        if (scan.index.entries.size() == order.size()) return;  // idempotent re-run
        throw CorruptionError("finished container is missing chunks: " + out_path);
    }

    // the already-present chunks must be exactly a prefix of the
    // canonical order, or the file was not produced by this importer
    std::vector<std::pair<ChunkAddress, std::uint64_t>> entries(scan.index.entries.begin(),
                                                                scan.index.entries.end());
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    if (entries.size() > order.size())
        throw CorruptionError("container has more chunks than expected: " + out_path);
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].first != order[i])
            throw CorruptionError("container chunk order does not match importer: " + out_path);

    ImportProgress prog;
    prog.chunks_total = order.size();
    prog.chunks_written = entries.size();

    std::uint64_t pos = scan.resume_point;
    std::int64_t appended = 0;
    {
        AppendFileHandle out(out_path);
        const Volume* level_data = &volume;
        Volume owned;
        std::size_t next = entries.size();
        std::size_t cursor = 0;
        for (std::uint32_t level = 0; level < meta.level_count; ++level) {
            const auto g = meta.level_grid(level);
            const std::size_t level_chunks =
                static_cast<std::size_t>(g[0]) * g[1] * g[2];
            for (std::size_t c = 0; c < level_chunks; ++c, ++cursor) {
                if (cursor < next) continue;  // already on disk
                if (stop_after_chunks >= 0 && appended >= stop_after_chunks) return;
                const ChunkAddress& addr = order[cursor];
                const Block b = extract_block(*level_data, meta, level, addr.coords);
                const auto record = detail::encode_chunk_record(
                    kContainerVersionVolume, addr, b.voxels.data(), b.voxels.size());
                out.write(record);
                entries.emplace_back(addr, pos);
                pos += record.size();
                ++appended;
                ++prog.chunks_written;
                if (progress) progress(prog);
            }
            if (level + 1 < meta.level_count) {
                Volume next_level = downsample_half(*level_data);
                // re-derive channel geometry sanity for coarser levels
                owned = std::move(next_level);
                level_data = &owned;
            }
        }
    }
    detail::write_footer(out_path, kContainerVersionVolume, entries, pos);
}

// --- slice stacks -----------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

VolumeMeta read_stack_meta(const SliceStack& stack) {
    const std::string meta_path =
        stack.meta_file.empty() ? stack.directory + "/stack.meta" : stack.meta_file;
    std::ifstream in(meta_path);
    if (!in) throw IoError("cannot open metadata file: " + meta_path);
    VolumeMeta meta;
    bool have_dims = false, have_block = false;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        const auto vals = split_ws(line.substr(eq + 1));
        if (key == "dims" && vals.size() == 3) {
            for (int a = 0; a < 3; ++a) meta.dims[a] = static_cast<std::uint32_t>(std::stoul(vals[a]));
            have_dims = true;
        } else if (key == "spacing" && vals.size() == 3) {
            for (int a = 0; a < 3; ++a) meta.voxel_spacing[a] = std::stod(vals[a]);
        } else if (key == "channels" && vals.size() == 1) {
            meta.channels = static_cast<std::uint16_t>(std::stoul(vals[0]));
        } else if (key == "bits" && vals.size() == 1) {
            meta.bits_per_channel = static_cast<std::uint16_t>(std::stoul(vals[0]));
        } else if (key == "block_size" && vals.size() == 1) {
            meta.block_size = static_cast<std::uint32_t>(std::stoul(vals[0]));
            have_block = true;
        }
    }
    if (!have_dims) throw FormatError("metadata file missing dims: " + meta_path);
    if (!have_block) throw FormatError("metadata file missing block_size: " + meta_path);
    meta.level_count = VolumeMeta::required_level_count(meta.dims, meta.block_size);
    validate_meta(meta);
    return meta;
}

Volume load_slice_stack(const SliceStack& stack, const VolumeMeta& meta) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(stack.directory)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
            files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());  // zero-padded z index sorts lexicographically
    if (files.size() != meta.dims[2])
        throw FormatError("slice count " + std::to_string(files.size()) + " != dims.z " +
                          std::to_string(meta.dims[2]) + " in " + stack.directory);
    Volume v = Volume::zeros(meta.dims, meta.channels, meta.bits_per_channel);
    for (std::uint32_t z = 0; z < meta.dims[2]; ++z) {
        const RasterSlice s = read_slice_any(files[z]);
        if (s.width != static_cast<int>(meta.dims[0]) ||
            s.height != static_cast<int>(meta.dims[1]))
            throw FormatError("slice dimensions mismatch: " + files[z]);
        if (s.channels != meta.channels)
            throw FormatError("slice channel count mismatch: " + files[z]);
        if (s.bits != meta.bits_per_channel)
            throw FormatError("slice bit depth mismatch: " + files[z]);
        for (std::uint32_t y = 0; y < meta.dims[1]; ++y)
            for (std::uint32_t x = 0; x < meta.dims[0]; ++x)
                for (std::uint32_t c = 0; c < meta.channels; ++c)
                    v.set_value(x, y, z, c,
                                s.samples[(static_cast<std::size_t>(y) * s.width + x) *
                                              s.channels +
                                          c]);
    }
    return v;
}

ContainerHandle import_stack(const SliceStack& stack, const std::string& out_path,
                             const ProgressFn& progress) {
    const VolumeMeta meta = read_stack_meta(stack);
    const Volume v = load_slice_stack(stack, meta);
    import_volume(v, meta, out_path, progress);
    return std::make_shared<ContainerReader>(out_path);
}

}  // namespace voxcast
