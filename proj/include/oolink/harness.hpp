#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include "oolink/decoder.hpp"

namespace oolink {

struct SweepSpec {
    std::vector<double> snr_db;
    std::vector<int> g_list;
    std::vector<Mcs> mcs_list;
    NoiseModel noise_model = NoiseModel::WhitePerSample;
    std::vector<ChannelTap> taps = {{0, cxd(1.0, 0.0)}};
    double cfo_hz = 0.0;
    int trials = 3000;          // packets per axis point (paper-scale default)
    int packet_len = 100;       // bytes
    uint64_t seed = 1;
    std::vector<ReceiverKind> receivers = {ReceiverKind::Baseline, ReceiverKind::TfiJoint,
                                           ReceiverKind::TfiAvg};
    bool genie_sync = false;    // bypass detection/sync/CFO with ground truth
    RxOptions rx{};
    int timing_pad_base = 400;  // leading noise-only base-rate samples
    int jobs = 0;               // 0 = hardware concurrency

    SweepSpec() {
        // sweeps reach well below the SNR where the 0.8 plateau default
        // still fires (plateau height is snr/(1+snr)); 0.5 keeps the
        // false-alarm rate negligible while detection tracks the waterfalls
        rx.detect.threshold = 0.5;
    }
};

struct TrialMetrics {
    long bits = 0;
    long bit_errors = 0;
    bool detected = false;
    bool packet_ok = false;
    double sync_err_base = 0.0;  // |timing error| in base-rate samples
    double cfo_err_hz = 0.0;
    bool frontend_valid = false; // sync/cfo errors meaningful (non-genie, synced)
};

struct PointSpec {
    Mcs mcs;
    int g = 1;
    double snr_db = kInfSnrDb;
};

/// One TX -> channel -> RX pass for every requested receiver. The baseline
/// receiver decodes the decimated (base-rate) view of the same stream, so
/// receivers at one axis point always see identical noise realizations.
std::vector<TrialMetrics> run_trial(const PointSpec& point, long trial_index,
                                    const SweepSpec& spec, const FrameConfig& config);

struct SweepRow {
    ReceiverKind receiver;
    Mcs mcs;
    int g = 1;
    NoiseModel noise_model;
    double snr_db = 0.0;
    long trials = 0;
    long bits = 0;
    long bit_errors = 0;
    double ber = 0.0;
    long packets = 0;
    long packets_ok = 0;
    double prr = 0.0;
    double sync_err_mean = 0.0;
    double sync_err_median = 0.0;
    double cfo_err_hz_rms = 0.0;
    double wall_time_s = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

std::string receiver_name(ReceiverKind kind);
ReceiverKind parse_receiver(const std::string& name);

/// Every axis combination x receiver, trials aggregated, rows sorted by
/// (receiver, mcs, G, snr). Deterministic for a fixed spec apart from the
/// wall_time_s column. An optional stop flag ends the sweep between points
/// with the rows finished so far.
SweepReport run_sweep(const SweepSpec& spec, const FrameConfig& config,
                      const std::atomic<bool>* stop = nullptr,
                      const std::function<void(const std::string&)>& progress = {});

/// Exact CSV schema:
/// receiver,mcs,coding,G,noise_model,snr_db,trials,bits,bit_errors,ber,
/// packets,packets_ok,prr,sync_err_mean,sync_err_median,cfo_err_hz_rms,wall_time_s
std::string sweep_csv_header();
std::string sweep_report_to_csv(const SweepReport& report);

/// Ideal combining gain of G-fold oversampling, in dB.
double theoretical_gain_db(int g);

struct PowerSavingsRow {
    Mcs mcs;
    int g = 1;
    double target_prr = 0.0;
    double min_snr_db = 0.0;       // overclocked receiver
    double baseline_snr_db = 0.0;
    double delta_db = 0.0;
    double savings = 0.0;          // fraction in [0, 1)
    bool reachable = false;
};

struct PowerSavingsReport {
    std::vector<PowerSavingsRow> rows;
};

/// Minimum SNR reaching the target PRR, linearly interpolated between the
/// bracketing grid points, for the tfi_joint receiver against the baseline
/// at the same (mcs, G). Unreachable targets are flagged, not fatal.
PowerSavingsReport power_savings(const SweepReport& report, double target_prr);

/// CSV schema: mcs,G,target_prr,min_snr_db,delta_db,savings_pct
std::string power_csv_header();
std::string power_report_to_csv(const PowerSavingsReport& report);

/// SNR at which an interpolated metric-vs-SNR curve crosses a target.
/// Rows must belong to one (receiver, mcs, G) and get sorted by SNR; BER
/// interpolation is linear in log10(ber), PRR interpolation linear.
double snr_at_ber(std::vector<SweepRow> rows, double target_ber);
double snr_at_prr(std::vector<SweepRow> rows, double target_prr);

/// Paired-stream evaluation: one channel realization per trial simulated at
/// max(G), decimated views handed to each smaller G, decoded with tfi_joint.
/// ok[i][t] is the CRC outcome for g_list[i], trial t.
std::vector<std::vector<uint8_t>> run_paired_prr(const Mcs& mcs, double snr_db,
                                                 const std::vector<int>& g_list,
                                                 const SweepSpec& spec,
                                                 const FrameConfig& config);

/// Paired ISI-shift comparison: identical streams decoded with shifted and
/// unshifted FFT windows (genie sync, uncoded decisions compared bitwise).
struct IsiPairResult {
    long bits = 0;
    long errors_shift_on = 0;
    long errors_shift_off = 0;
};
IsiPairResult run_paired_isi(const Mcs& mcs, double snr_db, int g, long min_bits,
                             const SweepSpec& spec, const FrameConfig& config);

}  // namespace oolink
