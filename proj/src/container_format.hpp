#pragma once

// On-disk encoding helpers shared by the volume and movie container
// code. Internal to the library.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "voxcast/container.hpp"
#include "voxcast/error.hpp"

namespace voxcast::detail {

constexpr char kMagic[4] = {'S', 'Y', 'G', 'C'};
constexpr char kFooterMagic[4] = {'S', 'Y', 'G', 'X'};
constexpr std::uint8_t kCompleteFlag = 0xA5;
constexpr std::size_t kPrologueSize = 54;
constexpr std::size_t kTailSize = 12;  // footer offset u64 + footer magic

inline std::size_t chunk_header_size(std::uint16_t version) {
    return version == kContainerVersionMovie ? 29 : 25;
}
inline std::size_t footer_entry_size(std::uint16_t version) {
    return version == kContainerVersionMovie ? 25 : 21;
}

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct ByteCursor {
    const std::uint8_t* p;
    const std::uint8_t* end;

    bool has(std::size_t n) const { return static_cast<std::size_t>(end - p) >= n; }
    std::uint8_t u8() { return *p++; }
    std::uint16_t u16() {
        std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        p += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

inline std::vector<std::uint8_t> make_prologue(std::uint16_t version, const VolumeMeta& m) {
    std::vector<std::uint8_t> out;
    out.reserve(kPrologueSize);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, version);
    for (int a = 0; a < 3; ++a) put_u32(out, m.dims[a]);
    put_u16(out, m.channels);
    put_u16(out, m.bits_per_channel);
    for (int a = 0; a < 3; ++a) put_f64(out, m.voxel_spacing[a]);
    put_u32(out, m.block_size);
    put_u32(out, m.level_count);
    return out;
}

struct RawChunkHeader {
    ChunkAddress addr;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t crc32 = 0;
};

inline std::vector<std::uint8_t> encode_chunk_header(std::uint16_t version,
                                                     const RawChunkHeader& h) {
    std::vector<std::uint8_t> out;
    out.reserve(chunk_header_size(version));
    if (version == kContainerVersionMovie) put_u32(out, h.addr.frame);
    put_u8(out, static_cast<std::uint8_t>(h.addr.level));
    for (int a = 0; a < 3; ++a) put_u32(out, h.addr.coords[a]);
    put_u32(out, h.compressed_size);
    put_u32(out, h.uncompressed_size);
    put_u32(out, h.crc32);
    return out;
}

inline RawChunkHeader decode_chunk_header(std::uint16_t version, const std::uint8_t* bytes) {
    ByteCursor c{bytes, bytes + chunk_header_size(version)};
    RawChunkHeader h;
    if (version == kContainerVersionMovie) h.addr.frame = c.u32();
    h.addr.level = c.u8();
    for (int a = 0; a < 3; ++a) h.addr.coords[a] = c.u32();
    h.compressed_size = c.u32();
    h.uncompressed_size = c.u32();
    h.crc32 = c.u32();
    return h;
}

inline void encode_footer_entry(std::uint16_t version, std::vector<std::uint8_t>& out,
                                const ChunkAddress& addr, std::uint64_t offset) {
    if (version == kContainerVersionMovie) put_u32(out, addr.frame);
    put_u8(out, static_cast<std::uint8_t>(addr.level));
    for (int a = 0; a < 3; ++a) put_u32(out, addr.coords[a]);
    put_u64(out, offset);
}

struct AppendFileHandle {
    std::FILE* f = nullptr;

    explicit AppendFileHandle(const std::string& path) {
        f = std::fopen(path.c_str(), "ab");
        if (!f) throw IoError("cannot open for append: " + path);
    }
    ~AppendFileHandle() {
        if (f) std::fclose(f);
    }
    AppendFileHandle(const AppendFileHandle&) = delete;
    void write(const std::uint8_t* data, std::size_t n) {
        if (std::fwrite(data, 1, n, f) != n) throw IoError("short write");
    }
    void write(const std::vector<std::uint8_t>& v) { write(v.data(), v.size()); }
};

std::vector<std::uint8_t> encode_chunk_record(std::uint16_t version, const ChunkAddress& addr,
                                              const std::uint8_t* voxels, std::size_t nbytes);
ScanResult prepare_append(const std::string& path, std::uint16_t version,
                          const VolumeMeta& meta);
void write_footer(const std::string& path, std::uint16_t version,
                  const std::vector<std::pair<ChunkAddress, std::uint64_t>>& entries,
                  std::uint64_t footer_offset);

}  // namespace voxcast::detail
