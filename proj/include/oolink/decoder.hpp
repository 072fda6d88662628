#pragma once

#include <optional>
#include <vector>

#include "oolink/channel.hpp"
#include "oolink/frontend.hpp"
#include "oolink/noise_map.hpp"

namespace oolink {

/// G frequency-domain copies of one OFDM symbol after phase-shift
/// compensation. At G=1 this is a plain FFT output.
struct SymbolCopies {
    int g = 1;
    int symbol_index = 0;
    std::vector<std::vector<cxd>> bins;  // g x 64
};

/// Oversample index of the FFT window for one symbol, anchored at the first
/// LTF block. With isi_shift the windows move (G-1) oversamples into the
/// cyclic prefix so no copy reads interpolated samples contaminated by the
/// next symbol; the shift applies identically to LTF and payload windows so
/// the copy phase relation is unchanged.
long ltf_window_start(long ltf_block1_start, int block, int g, bool isi_shift);
long payload_window_start(long ltf_block1_start, int symbol_index, int g, bool isi_shift);

/// Raw interleaved samples of the G copies: copies[g][n] = stream[w + g + G n].
TimeCopyMatrix extract_time_copies(const SampleStream& stream, long window_start, int g);

/// Copies of the symbol at an explicit window start: per copy, 64-point FFT
/// followed by the fractional-delay phase compensation
/// e^{-j 2 pi k g / (64 G)} on each bin's signed subcarrier frequency k.
SymbolCopies extract_copies_at(const SampleStream& stream, long window_start, int g,
                               const FrameConfig& config, int symbol_index = 0);

/// Payload-symbol variant with the standard window placement.
SymbolCopies extract_copies(const SampleStream& stream, long ltf_block1_start, int symbol_index,
                            const FrameConfig& config, int g, bool isi_shift);

/// Per data subcarrier, argmax over the constellation of the summed
/// per-copy log likelihoods. Ties break to the lowest point index.
std::vector<int> decode_joint_ml(const SymbolCopies& copies, const NoiseMap& map,
                                 const FrameConfig& config, ModScheme scheme);

/// Strawman combiner: equalize each copy with the LS channel estimate,
/// average the G copies, then nearest-point.
std::vector<int> decode_average_nn(const SymbolCopies& copies, const NoiseMap& map,
                                   const FrameConfig& config, ModScheme scheme);

enum class ReceiverKind { Baseline, TfiJoint, TfiAvg };

struct GenieInfo {
    long symbol_start = 0;  // true oversample index of LTF block 1
    double cfo_hz = 0.0;    // true injected offset
};

struct RxOptions {
    bool isi_shift = true;
    NoiseMapMode map_mode = NoiseMapMode::EqualizedResidual;
    DetectOptions detect{};
    double clock_switch_s = 8e-6;
    FineCfoOptions fine_cfo{};
    int fine_cfo_payload_symbols = 8;  // payload symbols fed to the fine stage
    std::optional<GenieInfo> genie;    // bypass detection/sync/CFO when set
    bool keep_traces = false;
};

struct DecodeResult {
    bool detected = false;
    bool sync_ok = false;
    bool crc_ok = false;
    std::vector<uint8_t> payload;            // decoded bytes (without CRC)
    std::vector<uint8_t> info_bits;          // decoded payload+CRC bits
    std::vector<std::vector<int>> decisions; // per symbol, per data subcarrier
    DetectionResult detection;
    SyncResult sync;
    CfoEstimate cfo;
    std::vector<double> pilot_phase;         // per-symbol common correction
    std::vector<SymbolCopies> copies_dump;   // only when keep_traces
};

/// Full overclocked receive pipeline: base-rate detection, clock switch,
/// oversampled-LTF sync, coarse + fine CFO, shifted-window copy extraction,
/// KDE noise map, per-symbol pilot tracking and joint-ML (or averaging)
/// decisions, Viterbi when coded, CRC check.
///
/// At G=1 every stage degenerates to the standard receiver and the output
/// matches decode_baseline bit for bit.
DecodeResult decode_frame_tfi(const SampleStream& stream, const Mcs& mcs, int payload_len,
                              const FrameConfig& config, int g, const RxOptions& opts = {},
                              ReceiverKind kind = ReceiverKind::TfiJoint);

/// Standard 802.11-style receiver at the base clock rate: coarse CFO only,
/// least-squares channel estimate from the two LTF symbols, equalize, pilot
/// phase tracking, nearest-point, optional Viterbi, CRC.
DecodeResult decode_baseline(const SampleStream& base_stream, const Mcs& mcs, int payload_len,
                             const FrameConfig& config, const RxOptions& opts = {});

}  // namespace oolink
