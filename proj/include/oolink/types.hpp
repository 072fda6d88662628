#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oolink {

using cxd = std::complex<double>;

/// Rate-tagged complex baseband sample sequence.
struct SampleStream {
    std::vector<cxd> samples;
    double rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
    cxd& operator[](std::size_t i) { return samples[i]; }
    const cxd& operator[](std::size_t i) const { return samples[i]; }
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Mean per-sample power over a stream.
inline double mean_power(const std::vector<cxd>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : v) acc += std::norm(s);
    return acc / static_cast<double>(v.size());
}

/// Keep every G-th sample starting at offset (copy-0 samples of an oversampled stream).
inline SampleStream decimate(const SampleStream& in, int factor, std::size_t offset = 0) {
    if (factor < 1) throw std::invalid_argument("decimate: factor must be >= 1");
    SampleStream out;
    out.rate_hz = in.rate_hz / factor;
    out.samples.reserve(in.size() / factor + 1);
    for (std::size_t i = offset; i < in.size(); i += static_cast<std::size_t>(factor))
        out.samples.push_back(in.samples[i]);
    return out;
}

constexpr double kInfSnrDb = std::numeric_limits<double>::infinity();

}  // namespace oolink
