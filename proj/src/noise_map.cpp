#include "oolink/noise_map.hpp"

#include <cmath>
#include <stdexcept>

#include "oolink/decoder.hpp"

namespace oolink {
namespace {

constexpr double kBandwidthFloor = 1e-3;
constexpr double kDensityFloor = 1e-300;
// exp(-x) underflows to exactly 0.0 below -745; skipping larger exponents
// changes nothing in the summed density
constexpr double kExpCutoff = 745.0;

inline double wrap_pi(double x) {
    x = std::fmod(x + M_PI, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
    return x - M_PI;
}

}  // namespace

double NoiseMap::silverman_bandwidth(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) return kBandwidthFloor;
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(n - 1);
    double h = 1.06 * std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
    return std::max(h, kBandwidthFloor);
}

cxd NoiseMap::deviation(int bin, cxd observed, cxd candidate) const {
    if (mode == NoiseMapMode::RawDeviation) return observed - candidate * tx_scale;
    cxd h = channel[bin];
    if (std::abs(h) < 1e-12) h = cxd(1e-12, 0.0);
    return observed / h - candidate;
}

double NoiseMap::density(int data_idx, double a, double phi) const {
    const Kde& kde = kdes[data_idx];
    const std::size_t n = kde.amp.size();
    if (n == 0) return 0.0;
    const double inv2ha2 = 1.0 / (2.0 * kde.h_amp * kde.h_amp);
    const double inv2hp2 = 1.0 / (2.0 * kde.h_phase * kde.h_phase);

    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        // amplitude kernel, reflected at zero so no mass leaks to a < 0
        double ea = 0.0;
        double qd = (a - kde.amp[m]) * (a - kde.amp[m]) * inv2ha2;
        double qr = (a + kde.amp[m]) * (a + kde.amp[m]) * inv2ha2;
        if (qd < kExpCutoff) ea += std::exp(-qd);
        if (qr < kExpCutoff) ea += std::exp(-qr);
        if (ea == 0.0) continue;

        // phase kernel, wrapped onto the circle
        double ep = 0.0;
        for (int i = -2; i <= 2; ++i) {
            double v = phi - kde.phase[m] + 2.0 * M_PI * i;
            double q = v * v * inv2hp2;
            if (q < kExpCutoff) ep += std::exp(-q);
        }
        acc += ea * ep;
    }
    const double norm = 1.0 / (2.0 * M_PI * kde.h_amp * kde.h_phase);
    return acc * norm / static_cast<double>(n);
}

double NoiseMap::mixture_density(int data_idx, cxd dev) const {
    const Kde& kde = kdes[data_idx];
    const std::size_t n = kde.amp.size();
    if (n == 0) return 0.0;
    const double h2 = kde.h_mix * kde.h_mix;
    const double inv2h2 = 1.0 / (2.0 * h2);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const cxd center = std::polar(kde.amp[m], kde.phase[m]);
        const double q = std::norm(dev - center) * inv2h2;
        if (q < kExpCutoff) acc += std::exp(-q);
    }
    return acc / (2.0 * M_PI * h2 * static_cast<double>(n));
}

NoiseMap NoiseMap::isotropic(double sigma, const FrameConfig& config) {
    NoiseMap map;
    map.mode = NoiseMapMode::EqualizedResidual;
    map.tx_scale = config.tx_bin_scale();
    for (auto& h : map.channel) h = cxd(1.0, 0.0);
    Kde kde;
    kde.amp = {0.0};
    kde.phase = {0.0};
    kde.h_amp = sigma;
    kde.h_phase = sigma;
    kde.h_mix = sigma;
    map.kdes.assign(config.data_subcarriers.size(), kde);
    return map;
}

NoiseMap build_noise_map(const SymbolCopies& ltf_block0, const SymbolCopies& ltf_block1,
                         const FrameConfig& config, NoiseMapMode mode) {
    const int g = ltf_block0.g;
    if (ltf_block1.g != g) throw std::invalid_argument("build_noise_map: copy count mismatch");
    if (2 * g < 2) throw std::invalid_argument("build_noise_map: insufficient samples");

    NoiseMap map;
    map.mode = mode;
    map.tx_scale = config.tx_bin_scale();

    std::array<cxd, 64> unit_ltf{};
    for (const auto& [k, v] : config.ltf_sequence) {
        unit_ltf[config.bin(k)] = v;
        map.tx_reference[config.bin(k)] = v * map.tx_scale;
    }

    // least-squares channel gain per occupied bin: mean of obs / known value
    std::array<cxd, 64> ls{};
    for (const auto& [k, v] : config.ltf_sequence) {
        const int b = config.bin(k);
        cxd acc(0.0, 0.0);
        for (int q = 0; q < g; ++q)
            acc += ltf_block0.bins[q][b] / v + ltf_block1.bins[q][b] / v;
        ls[b] = acc / static_cast<double>(2 * g);
    }
    // [1 2 1]/4 smoothing across neighboring occupied tones; CP-limited
    // channels vary slowly over one tone spacing, and the two LTF symbols
    // alone leave a noticeable estimation-noise penalty
    map.channel = ls;
    for (std::size_t i = 0; i < config.ltf_sequence.size(); ++i) {
        const int b = config.bin(config.ltf_sequence[i].first);
        cxd acc = 2.0 * ls[b];
        double w = 2.0;
        if (i > 0) {
            acc += ls[config.bin(config.ltf_sequence[i - 1].first)];
            w += 1.0;
        }
        if (i + 1 < config.ltf_sequence.size()) {
            acc += ls[config.bin(config.ltf_sequence[i + 1].first)];
            w += 1.0;
        }
        map.channel[b] = acc / w;
    }

    map.kdes.resize(config.data_subcarriers.size());
    for (std::size_t i = 0; i < config.data_subcarriers.size(); ++i) {
        const int b = config.bin(config.data_subcarriers[i]);
        NoiseMap::Kde& kde = map.kdes[i];
        kde.amp.reserve(2 * g);
        kde.phase.reserve(2 * g);
        for (const SymbolCopies* blk : {&ltf_block0, &ltf_block1}) {
            for (int q = 0; q < g; ++q) {
                cxd d = map.deviation(b, blk->bins[q][b], unit_ltf[b]);
                kde.amp.push_back(std::abs(d));
                kde.phase.push_back(wrap_pi(std::arg(d)));
            }
        }
        kde.h_amp = NoiseMap::silverman_bandwidth(kde.amp);
        kde.h_phase = NoiseMap::silverman_bandwidth(kde.phase);
    }

    // Mixture bandwidth: Silverman width plus the per-component sample
    // scatter, so a handful of kernels is not memorized as the density.
    // 2G samples per tone make a poor scatter estimate; the
    // pre-equalization noise power is common to all tones, so pool the
    // scatter in raw observation space and rescale per tone.
    double pooled_raw = 0.0;
    long pooled_n = 0;
    std::vector<double> scatter2(map.kdes.size(), 0.0);
    for (std::size_t i = 0; i < map.kdes.size(); ++i) {
        const NoiseMap::Kde& kde = map.kdes[i];
        const int b = config.bin(config.data_subcarriers[i]);
        cxd mean(0.0, 0.0);
        std::vector<cxd> pts(kde.amp.size());
        for (std::size_t m = 0; m < pts.size(); ++m) {
            pts[m] = std::polar(kde.amp[m], kde.phase[m]);
            mean += pts[m];
        }
        mean /= static_cast<double>(pts.size());
        double s2 = 0.0;
        for (const cxd& p : pts) s2 += std::norm(p - mean);
        s2 /= 2.0 * static_cast<double>(pts.size());
        scatter2[i] = s2;
        const double gain2 = mode == NoiseMapMode::RawDeviation ? 1.0 : std::norm(map.channel[b]);
        pooled_raw += s2 * gain2 * static_cast<double>(pts.size());
        pooled_n += static_cast<long>(pts.size());
    }
    pooled_raw /= static_cast<double>(std::max(pooled_n, 1L));
    for (std::size_t i = 0; i < map.kdes.size(); ++i) {
        NoiseMap::Kde& kde = map.kdes[i];
        const int b = config.bin(config.data_subcarriers[i]);
        const double gain2 = mode == NoiseMapMode::RawDeviation ? 1.0 : std::norm(map.channel[b]);
        const double local = pooled_raw / std::max(gain2, 1e-24);
        // keep whatever extra spread this tone shows beyond the pooled level
        const double s2 = std::max(local, scatter2[i]);
        kde.h_mix = std::max(std::sqrt(kde.h_amp * kde.h_amp + s2), kBandwidthFloor);
    }
    return map;
}

double likelihood(const NoiseMap& map, int data_idx, cxd observed, cxd candidate,
                  const FrameConfig& config) {
    const int b = config.bin(config.data_subcarriers[data_idx]);
    cxd d = map.deviation(b, observed, candidate);
    return std::max(map.mixture_density(data_idx, d), kDensityFloor);
}

}  // namespace oolink
