#pragma once

#include <string>

#include "oolink/constellation.hpp"
#include "oolink/types.hpp"

namespace oolink {

/// Sidecar metadata for a recorded sample file.
struct StreamMeta {
    std::string mcs = "qpsk";
    int payload_len = 0;
    uint64_t seed = 0;
    int oversampling = 1;
    double rate_hz = 0.0;
};

/// Little-endian float32 interleaved (re, im) sample file.
void write_stream_f32(const std::string& path, const SampleStream& stream);

/// Throws std::runtime_error if the file is missing or its length is not a
/// multiple of 8 bytes.
SampleStream read_stream_f32(const std::string& path, double rate_hz);

void write_stream_meta(const std::string& path, const StreamMeta& meta);
StreamMeta read_stream_meta(const std::string& path);

}  // namespace oolink
