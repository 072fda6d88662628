#include "oolink/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oolink/fft.hpp"
#include "oolink/transmitter.hpp"

namespace oolink {
namespace {

constexpr double kEps = 1e-300;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

DetectionResult detect_packet(const SampleStream& base_stream, const DetectOptions& opts) {
    DetectionResult res;
    const auto& y = base_stream.samples;
    if (y.size() < 160) return res;

    const long last = static_cast<long>(y.size()) - 144;
    std::vector<double> metric(last, 0.0);
    for (long k = 0; k < last; ++k) {
        cxd corr(0.0, 0.0);
        double energy = 0.0;
        for (int n = 0; n < 128; ++n) {
            corr += y[k + n] * std::conj(y[k + n + 16]);
            energy += std::norm(y[k + n + 16]);
        }
        metric[k] = energy > kEps ? std::abs(corr) / energy : 0.0;
    }

    long run = 0;
    for (long k = 0; k < last; ++k) {
        if (metric[k] >= opts.threshold) {
            if (++run >= opts.plateau) {
                res.detected = true;
                res.coarse_start = k - opts.plateau + 1;
                break;
            }
        } else {
            run = 0;
        }
    }
    if (opts.keep_trace) res.metric_trace = std::move(metric);
    return res;
}

long model_clock_switch(const DetectionResult& det, const FrameConfig& config, int g,
                        double switch_latency_s) {
    if (!det.detected) throw std::runtime_error("model_clock_switch: packet not detected");
    const long latency = std::lround(switch_latency_s * config.base_rate_hz);
    // nine repetitions end 144 base samples into the STF; the switch must
    // finish inside the tenth repetition
    if (144 + latency > 160)
        throw std::runtime_error("model_clock_switch: switch latency exceeds the remaining STF");
    if (g == 1) return 0;
    return (det.coarse_start + 144 + latency) * g;
}

SampleStream build_reference_ltf(const FrameConfig& config, int g) {
    if (g < 1) throw std::invalid_argument("build_reference_ltf: G must be >= 1");
    const int n = config.nfft * g;
    std::vector<cxd> bins(n, cxd(0.0, 0.0));
    const double scale = config.tx_bin_scale();
    for (const auto& [k, v] : config.ltf_sequence) {
        int b = k >= 0 ? k : n + k;
        bins[b] = v * scale;
    }
    SampleStream ref;
    ref.rate_hz = config.base_rate_hz * g;
    ref.samples = idft(bins);
    // undo the 1/N inverse-transform shrink so sample values match the
    // band-limited interpolation of the G=1 block (decimating by G gives
    // the base-rate block back); the correlator normalizes energy itself
    for (auto& s : ref.samples) s *= static_cast<double>(g);
    return ref;
}

SyncResult sync_timing(const SampleStream& stream, const SampleStream& reference_block,
                       long coarse_start_base, int g, long valid_from, bool keep_trace) {
    const long block = static_cast<long>(reference_block.size());  // 64*G
    if (block != 64L * g) throw std::invalid_argument("sync_timing: reference/G mismatch");

    // both identical LTF blocks in one template
    std::vector<cxd> ref(2 * block);
    std::copy(reference_block.samples.begin(), reference_block.samples.end(), ref.begin());
    std::copy(reference_block.samples.begin(), reference_block.samples.end(),
              ref.begin() + block);
    double ref_energy = 0.0;
    for (const auto& s : ref) ref_energy += std::norm(s);
    const double ref_norm = std::sqrt(ref_energy);

    const long predicted = (coarse_start_base + 192) * g;  // STF + guard ahead of block 1
    const long span = 2L * 80 * g;                         // two symbols each way
    long lo = std::max({predicted - span, valid_from, 0L});
    long hi = std::min(predicted + span,
                       static_cast<long>(stream.size()) - 2 * block);
    if (hi < lo) throw std::runtime_error("sync_timing: empty search window");

    // cross correlation over the window via FFT
    const long n_lags = hi - lo + 1;
    const long seg_len = n_lags + 2 * block - 1;
    const std::size_t m = next_pow2(seg_len);
    std::vector<cxd> seg(m, cxd(0.0, 0.0));
    for (long i = 0; i < seg_len && lo + i < static_cast<long>(stream.size()); ++i)
        seg[i] = stream.samples[lo + i];
    std::vector<cxd> tpl(m, cxd(0.0, 0.0));
    std::copy(ref.begin(), ref.end(), tpl.begin());

    std::vector<cxd> fs = dft(seg);
    std::vector<cxd> ft = dft(tpl);
    for (std::size_t i = 0; i < m; ++i) fs[i] *= std::conj(ft[i]);
    std::vector<cxd> corr = idft(fs);

    // sliding window energy via prefix sums
    std::vector<double> prefix(seg_len + 1, 0.0);
    for (long i = 0; i < seg_len; ++i) prefix[i + 1] = prefix[i] + std::norm(seg[i]);

    SyncResult res;
    res.ok = true;
    double best = -1.0;
    long best_k = lo;
    if (keep_trace) res.trace.reserve(n_lags);
    for (long k = 0; k < n_lags; ++k) {
        double energy = prefix[k + 2 * block] - prefix[k];
        double metric = energy > kEps ? std::abs(corr[k]) / (ref_norm * std::sqrt(energy)) : 0.0;
        if (keep_trace) res.trace.push_back({lo + k, metric});
        if (metric > best) {
            best = metric;
            best_k = lo + k;
        }
    }
    res.symbol_start = best_k;
    res.peak_value = best;
    return res;
}

double estimate_cfo_coarse(const SampleStream& stream, long ltf_start, int g,
                           const FrameConfig& config) {
    const long block = 64L * g;
    if (ltf_start < 0 || ltf_start + 2 * block > static_cast<long>(stream.size()))
        throw std::runtime_error("estimate_cfo_coarse: LTF out of range");
    // correlate the base-aligned samples of the two blocks; interpolated
    // positions carry symbol-boundary leakage that would bias the angle
    cxd acc(0.0, 0.0);
    for (long m = 0; m < 64; ++m) {
        const long n = ltf_start + m * g;
        acc += std::conj(stream.samples[n]) * stream.samples[n + block];
    }
    return std::arg(acc) * config.base_rate_hz / (2.0 * M_PI * 64.0);
}

namespace {

std::vector<int> occupied_bins_of(const FrameConfig& config) {
    std::vector<int> occupied;
    for (int k : config.data_subcarriers) occupied.push_back(config.bin(k));
    for (int k : config.pilot_subcarriers) occupied.push_back(config.bin(k));
    std::sort(occupied.begin(), occupied.end());
    return occupied;
}

double fine_cfo_cost(const std::vector<TimeCopyMatrix>& symbols, double delta_hz,
                     const FrameConfig& config, int g,
                     const std::vector<int>& occupied_bins) {
    const double w = 2.0 * M_PI * delta_hz / (config.base_rate_hz * g);
    double cost = 0.0;
    std::vector<cxd> buf(64);
    for (const auto& sym : symbols) {
        std::vector<std::vector<cxd>> comp(g);
        for (int q = 0; q < g; ++q) {
            for (int n = 0; n < 64; ++n) {
                double ph = -w * (q + static_cast<double>(g) * n);
                buf[n] = sym[q][n] * cxd(std::cos(ph), std::sin(ph));
            }
            std::vector<cxd> spec = fft64(buf);
            comp[q].resize(occupied_bins.size());
            for (std::size_t i = 0; i < occupied_bins.size(); ++i) {
                int b = occupied_bins[i];
                int k = b < 32 ? b : b - 64;
                double ph = -2.0 * M_PI * k * q / (64.0 * g);
                comp[q][i] = spec[b] * cxd(std::cos(ph), std::sin(ph));
            }
        }
        for (int q = 1; q < g; ++q)
            for (std::size_t i = 0; i < occupied_bins.size(); ++i)
                cost += std::norm(comp[q][i] - comp[0][i]);
    }
    return cost;
}

}  // namespace

double fine_cfo_objective(const std::vector<TimeCopyMatrix>& symbols, double delta_hz,
                          const FrameConfig& config, int g) {
    return fine_cfo_cost(symbols, delta_hz, config, g, occupied_bins_of(config));
}

CfoEstimate estimate_cfo_fine(const std::vector<TimeCopyMatrix>& symbols, double coarse_hz,
                              const FrameConfig& config, int g, const FineCfoOptions& opts) {
    CfoEstimate est;
    est.coarse_hz = coarse_hz;
    est.fine_hz = coarse_hz;
    if (g < 2) return est;  // not applicable at the base clock
    if (symbols.empty()) throw std::invalid_argument("estimate_cfo_fine: no symbols");

    const std::vector<int> occupied = occupied_bins_of(config);

    const double spacing = config.subcarrier_spacing_hz();
    const double half = opts.search_half_range_frac * spacing;
    const double step = 2.0 * half / (opts.grid_points - 1);

    double best_delta = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opts.grid_points; ++i) {
        double d = -half + i * step;
        double c = fine_cfo_cost(symbols, d, config, g, occupied);
        if (c < best_cost) {
            best_cost = c;
            best_delta = d;
        }
    }

    // golden-section refinement around the best grid point
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_delta - step, b = best_delta + step;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = fine_cfo_cost(symbols, c, config, g, occupied);
    double fd = fine_cfo_cost(symbols, d, config, g, occupied);
    while (b - a > opts.tol_frac * spacing) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fine_cfo_cost(symbols, c, config, g, occupied);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fine_cfo_cost(symbols, d, config, g, occupied);
        }
    }
    double delta = 0.5 * (a + b);
    est.residual_cost = fine_cfo_cost(symbols, delta, config, g, occupied);
    est.fine_hz = coarse_hz + delta;
    est.fine_applicable = true;
    return est;
}

SampleStream compensate_cfo(const SampleStream& stream, double cfo_hz) {
    if (cfo_hz == 0.0) return stream;
    SampleStream out = stream;
    const double w = -2.0 * M_PI * cfo_hz / stream.rate_hz;
    for (std::size_t m = 0; m < out.size(); ++m)
        out.samples[m] *= cxd(std::cos(w * m), std::sin(w * m));
    return out;
}

double track_phase_pilots(const std::vector<cxd>& pilot_obs,
                          const std::vector<cxd>& pilot_expected) {
    if (pilot_obs.size() != pilot_expected.size())
        throw std::invalid_argument("track_phase_pilots: size mismatch");
    cxd acc(0.0, 0.0);
    for (std::size_t i = 0; i < pilot_obs.size(); ++i)
        acc += pilot_obs[i] * std::conj(pilot_expected[i]);
    if (std::abs(acc) < kEps) return 0.0;
    return std::arg(acc);
}

}  // namespace oolink
