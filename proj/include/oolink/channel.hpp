#pragma once

#include <vector>

#include "oolink/frame_config.hpp"
#include "oolink/rng.hpp"
#include "oolink/transmitter.hpp"
#include "oolink/types.hpp"

namespace oolink {

enum class NoiseModel { WhitePerSample, BandLimited };

struct ChannelTap {
    int delay = 0;  // oversamples
    cxd gain{1.0, 0.0};
};

struct ChannelConfig {
    int oversampling = 1;       // G, power of two
    double snr_db = kInfSnrDb;  // Es/N0 per base-rate sample over the occupied band
    double cfo_hz = 0.0;
    std::vector<ChannelTap> taps = {{0, cxd(1.0, 0.0)}};
    int timing_pad = 0;         // leading noise-only oversamples
    NoiseModel noise_model = NoiseModel::WhitePerSample;
    uint64_t seed = 1;

    /// Symbol energy referred to the occupied band: with unit per-sample
    /// transmit power on 56 of 64 tones, the in-band energy per sample is
    /// 64/56. Keeping the SNR reference here makes the per-subcarrier SNR
    /// equal snr_db exactly, so AWGN curves match their closed forms.
    double es_reference = 64.0 / 56.0;
};

/// Band-limited interpolation by whole-stream FFT zero padding (circular).
/// Every G-th output sample reproduces the input exactly and stream energy
/// scales by exactly G.
SampleStream resample_to_g(const SampleStream& in, int g);

/// Multiply sample n by e^{j 2 pi cfo n / rate}; rate is taken from the stream.
SampleStream apply_cfo(const SampleStream& in, double cfo_hz);

/// FIR convolution at oversample resolution. Taps must be nonempty with the
/// first delay 0; delays must stay within the CP budget cp_len*G - (G-1).
SampleStream apply_multipath(const SampleStream& in, const std::vector<ChannelTap>& taps,
                             const FrameConfig& config, int g);

/// Complex Gaussian noise with per-sample variance Es/10^(snr/10); the
/// BandLimited model filters white G-rate noise to a 1/(2G)-of-Nyquist
/// cutoff and renormalizes to the same per-sample variance.
SampleStream add_noise(const SampleStream& in, const ChannelConfig& cfg, Rng& rng);

struct ChannelOutput {
    SampleStream rx;        // oversampled received stream
    long frame_start = 0;   // ground truth: oversample index of the frame start
};

/// Full channel: resample to G, prepend the timing pad, multipath, CFO,
/// noise. Deterministic for a given config (seed included).
ChannelOutput run_channel(const Frame& frame, const ChannelConfig& cfg, const FrameConfig& config);
ChannelOutput run_channel_stream(const SampleStream& base_stream, const ChannelConfig& cfg,
                                 const FrameConfig& config);

}  // namespace oolink
