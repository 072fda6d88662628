#include "oolink/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "oolink/fft.hpp"

namespace oolink {

SampleStream resample_to_g(const SampleStream& in, int g) {
    if (g < 1) throw std::invalid_argument("resample_to_g: G must be >= 1");
    if (g == 1) return in;
    const std::size_t n = in.size();
    if (n == 0) return {{}, in.rate_hz * g};

    std::vector<cxd> spec = dft(in.samples);
    std::vector<cxd> up(n * g, cxd(0.0, 0.0));
    const std::size_t half = n / 2;
    // bins [0, n/2) keep their positive frequencies; the rest, Nyquist
    // included, land on the negative side (e^{-j pi n} = e^{+j pi n} at the
    // original sample grid, so decimation still recovers the input exactly
    // and Parseval holds with no split-bin loss)
    for (std::size_t k = 0; k < half; ++k) up[k] = spec[k] * static_cast<double>(g);
    for (std::size_t k = half; k < n; ++k)
        up[k + n * (g - 1)] = spec[k] * static_cast<double>(g);

    SampleStream out;
    out.rate_hz = in.rate_hz * g;
    out.samples = idft(up);
    return out;
}

SampleStream apply_cfo(const SampleStream& in, double cfo_hz) {
    if (cfo_hz == 0.0) return in;
    SampleStream out = in;
    const double w = 2.0 * M_PI * cfo_hz / in.rate_hz;
    for (std::size_t m = 0; m < out.size(); ++m)
        out.samples[m] *= cxd(std::cos(w * m), std::sin(w * m));
    return out;
}

SampleStream apply_multipath(const SampleStream& in, const std::vector<ChannelTap>& taps,
                             const FrameConfig& config, int g) {
    if (taps.empty()) throw std::invalid_argument("apply_multipath: taps must be nonempty");
    if (taps.front().delay != 0)
        throw std::invalid_argument("apply_multipath: first tap delay must be 0");
    const int budget = config.cp_len * g - (g - 1);
    for (const auto& t : taps)
        if (t.delay < 0 || t.delay >= budget)
            throw std::invalid_argument("apply_multipath: tap delay exceeds CP budget");

    SampleStream out;
    out.rate_hz = in.rate_hz;
    out.samples.assign(in.size(), cxd(0.0, 0.0));
    for (const auto& t : taps)
        for (std::size_t m = t.delay; m < in.size(); ++m)
            out.samples[m] += t.gain * in.samples[m - t.delay];
    return out;
}

SampleStream add_noise(const SampleStream& in, const ChannelConfig& cfg, Rng& rng) {
    if (std::isinf(cfg.snr_db)) return in;
    const double sigma2 = cfg.es_reference * db_to_lin(-cfg.snr_db);

    SampleStream out = in;
    if (cfg.noise_model == NoiseModel::WhitePerSample) {
        for (auto& s : out.samples) s += rng.cgaussian(sigma2);
        return out;
    }

    // BandLimited: shape white G-rate noise with a brickwall at 1/(2G) of
    // the oversampled Nyquist, then renormalize to per-sample power sigma2.
    const std::size_t n = in.size();
    std::vector<cxd> noise(n);
    for (auto& s : noise) s = rng.cgaussian(1.0);
    std::vector<cxd> spec = dft(noise);
    const double cutoff = 1.0 / (4.0 * cfg.oversampling);  // cycles per oversample
    for (std::size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) / n;
        if (f > 0.5) f -= 1.0;
        if (std::abs(f) > cutoff) spec[k] = cxd(0.0, 0.0);
    }
    noise = idft(spec);
    double p = mean_power(noise);
    if (p <= 0.0) return out;
    const double s = std::sqrt(sigma2 / p);
    for (std::size_t m = 0; m < n; ++m) out.samples[m] += noise[m] * s;
    return out;
}

ChannelOutput run_channel_stream(const SampleStream& base_stream, const ChannelConfig& cfg,
                                 const FrameConfig& config) {
    if (cfg.oversampling < 1 || (cfg.oversampling & (cfg.oversampling - 1)) != 0)
        throw std::invalid_argument("run_channel: G must be a power of two");

    SampleStream up = resample_to_g(base_stream, cfg.oversampling);

    SampleStream padded;
    padded.rate_hz = up.rate_hz;
    padded.samples.assign(cfg.timing_pad, cxd(0.0, 0.0));
    padded.samples.insert(padded.samples.end(), up.samples.begin(), up.samples.end());

    SampleStream faded = apply_multipath(padded, cfg.taps, config, cfg.oversampling);
    SampleStream rotated = apply_cfo(faded, cfg.cfo_hz);

    Rng rng(derive_seed(cfg.seed, {0xC0FFEEu}));
    ChannelOutput out;
    out.rx = add_noise(rotated, cfg, rng);
    out.frame_start = cfg.timing_pad;
    return out;
}

ChannelOutput run_channel(const Frame& frame, const ChannelConfig& cfg, const FrameConfig& config) {
    return run_channel_stream(frame.concat(), cfg, config);
}

}  // namespace oolink
