#include "oolink/sample_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace oolink {

void write_stream_f32(const std::string& path, const SampleStream& stream) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& s : stream.samples) {
        float re = static_cast<float>(s.real());
        float im = static_cast<float>(s.imag());
        f.write(reinterpret_cast<const char*>(&re), sizeof(float));
        f.write(reinterpret_cast<const char*>(&im), sizeof(float));
    }
}

SampleStream read_stream_f32(const std::string& path, double rate_hz) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw std::runtime_error("cannot open sample file: " + path);
    const auto bytes = static_cast<std::size_t>(f.tellg());
    if (bytes % 8 != 0)
        throw std::runtime_error("malformed sample file (size not a multiple of 8 bytes): " + path);
    f.seekg(0);
    SampleStream out;
    out.rate_hz = rate_hz;
    out.samples.resize(bytes / 8);
    for (auto& s : out.samples) {
        float re = 0, im = 0;
        f.read(reinterpret_cast<char*>(&re), sizeof(float));
        f.read(reinterpret_cast<char*>(&im), sizeof(float));
        s = cxd(re, im);
    }
    return out;
}

void write_stream_meta(const std::string& path, const StreamMeta& meta) {
    nlohmann::json j;
    j["mcs"] = meta.mcs;
    j["payload_len"] = meta.payload_len;
    j["seed"] = meta.seed;
    j["oversampling"] = meta.oversampling;
    j["rate_hz"] = meta.rate_hz;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

StreamMeta read_stream_meta(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open sidecar: " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    StreamMeta m;
    m.mcs = j.value("mcs", "qpsk");
    m.payload_len = j.value("payload_len", 0);
    m.seed = j.value("seed", uint64_t{0});
    m.oversampling = j.value("oversampling", 1);
    m.rate_hz = j.value("rate_hz", 0.0);
    return m;
}

}  // namespace oolink
