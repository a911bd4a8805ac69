#include "voxcast/lz4_codec.hpp"

#include <zlib.h>

#include <limits>

#include "voxcast/error.hpp"

// No lz4.h on the build image; these are the stable documented entry
// points of liblz4 (block API).
extern "C" {
int LZ4_compressBound(int inputSize);
int LZ4_compress_default(const char* src, char* dst, int srcSize, int dstCapacity);
int LZ4_decompress_safe(const char* src, char* dst, int compressedSize, int dstCapacity);
}

namespace voxcast {

std::size_t lz4_bound(std::size_t input_size) {
    if (input_size > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw Error("lz4: input too large");
    return static_cast<std::size_t>(LZ4_compressBound(static_cast<int>(input_size)));
}

std::vector<std::uint8_t> lz4_compress(const std::uint8_t* data, std::size_t size) {
    std::vector<std::uint8_t> out(lz4_bound(size));
    const int n = LZ4_compress_default(reinterpret_cast<const char*>(data),
                                       reinterpret_cast<char*>(out.data()),
                                       static_cast<int>(size), static_cast<int>(out.size()));
    if (n <= 0) throw Error("lz4: compression failed");
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> lz4_decompress(const std::uint8_t* data, std::size_t size,
                                         std::size_t uncompressed_size) {
    std::vector<std::uint8_t> out(uncompressed_size);
    const int n = LZ4_decompress_safe(reinterpret_cast<const char*>(data),
                                      reinterpret_cast<char*>(out.data()),
                                      static_cast<int>(size), static_cast<int>(out.size()));
    if (n < 0 || static_cast<std::size_t>(n) != uncompressed_size)
        throw CorruptionError("lz4: malformed block");
    return out;
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(size)));
}

}  // namespace voxcast
