#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voxcast {

std::size_t lz4_bound(std::size_t input_size);

/// LZ4 block compression of a whole buffer. Deterministic for a given
/// library version, which the container's byte-identity guarantees
/// rely on.
std::vector<std::uint8_t> lz4_compress(const std::uint8_t* data, std::size_t size);

/// Decompresses an LZ4 block with a known uncompressed size; throws
/// CorruptionError if the stream is malformed or the size disagrees.
std::vector<std::uint8_t> lz4_decompress(const std::uint8_t* data, std::size_t size,
                                         std::size_t uncompressed_size);

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size);

}  // namespace voxcast
