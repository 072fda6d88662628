#pragma once

#include <cstdint>
#include <vector>

namespace oolink {

/// Standard reflected CRC-32 (IEEE 802.3 polynomial 0xEDB88320,
/// init 0xFFFFFFFF, final xor 0xFFFFFFFF). crc32({}) == 0.
uint32_t crc32(const std::vector<uint8_t>& bytes);
uint32_t crc32(const uint8_t* data, std::size_t len);

}  // namespace oolink
