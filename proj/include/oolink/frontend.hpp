#pragma once

#include <optional>
#include <vector>

#include "oolink/frame_config.hpp"
#include "oolink/types.hpp"

namespace oolink {

struct DetectOptions {
    double threshold = 0.8;
    int plateau = 32;  // consecutive super-threshold lags required
    bool keep_trace = false;
};

struct DetectionResult {
    bool detected = false;
    long coarse_start = 0;               // base-rate index of plateau onset
    std::vector<double> metric_trace;    // filled when keep_trace is set
};

/// Packet detection at base rate: normalized lag-16 auto-correlation over a
/// nine-repetition window,
///   m[k] = |sum_{n<128} y[k+n] conj(y[k+n+16])| / sum_{n<128} |y[k+n+16]|^2,
/// declared detected when m stays above the threshold for a full plateau.
DetectionResult detect_packet(const SampleStream& base_stream, const DetectOptions& opts = {});

/// First oversample index at which G-rate samples are available: end of the
/// ninth STF repetition plus the PLL settle latency. Throws when the latency
/// does not fit in the tenth repetition.
long model_clock_switch(const DetectionResult& det, const FrameConfig& config, int g,
                        double switch_latency_s = 8e-6);

/// Ideal oversampled LTF block: the long training frequency sequence
/// zero-padded to 64*G and inverse-transformed, scaled so the block energy
/// is independent of G (and equal to one transmitted LTF block at G=1).
SampleStream build_reference_ltf(const FrameConfig& config, int g);

struct SyncResult {
    bool ok = false;
    long symbol_start = 0;   // oversample index of the first LTF 64-block
    double peak_value = 0.0; // normalized cross-correlation in [0, 1]
    std::vector<std::pair<long, double>> trace;  // (lag, metric) when requested
};

/// Timing synchronization: normalized cross-correlation of the received
/// G-rate stream against both identical LTF blocks, searched over
/// coarse_start +- 2 symbols. Ties break to the earliest lag. Throws when
/// the clamped search window is empty.
SyncResult sync_timing(const SampleStream& stream, const SampleStream& reference_block,
                       long coarse_start_base, int g, long valid_from = 0,
                       bool keep_trace = false);

struct CfoEstimate {
    double coarse_hz = 0.0;
    double fine_hz = 0.0;
    double residual_cost = 0.0;
    bool fine_applicable = false;  // false at G=1 (pass-through)
};

/// Coarse CFO from the phase rotation between the two identical LTF blocks.
/// Unambiguous inside +-base_rate/128.
double estimate_cfo_coarse(const SampleStream& stream, long ltf_start, int g,
                           const FrameConfig& config);

/// Time-domain samples of the G interleaved copies of one symbol window:
/// copies[g][n] = stream[window + g + G*n].
using TimeCopyMatrix = std::vector<std::vector<cxd>>;

struct FineCfoOptions {
    double search_half_range_frac = 0.02;  // of the subcarrier spacing
    int grid_points = 64;
    double tol_frac = 1e-3;                // golden-section stop, of spacing
};

/// Copy-disagreement objective for a candidate residual offset: de-rotate
/// each copy, transform, undo the per-copy fractional-delay phase, and sum
/// the squared distance of every copy to copy 0 over the occupied tones.
/// Zero at the true offset in the noiseless case.
double fine_cfo_objective(const std::vector<TimeCopyMatrix>& symbols, double delta_hz,
                          const FrameConfig& config, int g);

/// Fine ML refinement of the residual CFO: grid search plus golden-section
/// minimization of the copy-disagreement objective over the supplied
/// symbols. The input copies come from the coarse-compensated stream; the
/// returned fine_hz is the absolute offset.
CfoEstimate estimate_cfo_fine(const std::vector<TimeCopyMatrix>& symbols, double coarse_hz,
                              const FrameConfig& config, int g,
                              const FineCfoOptions& opts = {});

/// Multiply sample n by e^{-j 2 pi f n / rate} (exact inverse of apply_cfo).
SampleStream compensate_cfo(const SampleStream& stream, double cfo_hz);

/// Common phase of one symbol from its pilot observations:
/// angle(sum obs * conj(expected)).
double track_phase_pilots(const std::vector<cxd>& pilot_obs,
                          const std::vector<cxd>& pilot_expected);

}  // namespace oolink
