#pragma once

#include <cstdint>
#include <vector>

#include "oolink/frame_config.hpp"

namespace oolink {

/// Out-of-band frame description (no SIG field is transmitted; length and
/// MCS travel with the frame object / sidecar metadata instead).
struct FrameMeta {
    Mcs mcs;
    int payload_len = 0;       // bytes, excluding CRC
    uint32_t crc = 0;
    std::vector<uint8_t> payload;    // original bytes
    std::vector<uint8_t> info_bits;  // payload+CRC bits before coding/padding
    int n_payload_symbols = 0;
};

struct Frame {
    SampleStream stf;                          // 160 base samples
    SampleStream ltf;                          // 160 base samples
    std::vector<SampleStream> payload_symbols; // 80 samples each
    FrameMeta meta;

    /// STF || LTF || payload symbols as one base-rate stream.
    SampleStream concat() const;
    std::size_t total_len() const { return 320 + 80 * payload_symbols.size(); }
};

/// Ten repetitions of the 16-sample short training period.
SampleStream build_stf(const FrameConfig& config);

/// 32-sample cyclic guard followed by two identical 64-sample training blocks.
SampleStream build_ltf(const FrameConfig& config);

/// Payload symbol count for a given payload length and MCS.
int n_payload_symbols(int payload_len, const Mcs& mcs, const FrameConfig& config);

/// Bytes -> bits, LSB of each byte first.
std::vector<uint8_t> bytes_to_bits(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> bits_to_bytes(const std::vector<uint8_t>& bits);

/// Build a complete frame: payload + CRC-32, optional rate-1/2 coding,
/// modulation onto the 52 data tones with +1 pilots, per-symbol IFFT and
/// 16-sample cyclic prefix. Throws on empty payload.
Frame assemble_frame(const std::vector<uint8_t>& payload_bytes, const Mcs& mcs,
                     const FrameConfig& config);

}  // namespace oolink
