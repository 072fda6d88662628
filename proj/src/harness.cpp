#include "oolink/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace oolink {
namespace {

uint64_t hash_double(double v) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    return bits;
}

uint64_t point_key(const PointSpec& p, const SweepSpec& spec) {
    uint64_t k = splitmix64(hash_double(p.snr_db));
    k = splitmix64(k ^ static_cast<uint64_t>(p.g));
    k = splitmix64(k ^ static_cast<uint64_t>(static_cast<int>(p.mcs.scheme) * 2 +
                                             static_cast<int>(p.mcs.coding)));
    k = splitmix64(k ^ static_cast<uint64_t>(static_cast<int>(spec.noise_model)));
    return k;
}

std::vector<uint8_t> random_payload(int len, Rng& rng) {
    std::vector<uint8_t> bytes(len);
    for (auto& b : bytes) b = static_cast<uint8_t>(rng.next_u64() & 0xFF);
    return bytes;
}

long hamming(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    long err = 0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) err += (a[i] & 1) != (b[i] & 1);
    err += static_cast<long>(std::max(a.size(), b.size()) - n);
    return err;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TrialMetrics score(const DecodeResult& res, const Frame& frame, long t1_truth, double cfo_truth,
                   int g, bool genie) {
    TrialMetrics m;
    m.bits = static_cast<long>(frame.meta.info_bits.size());
    m.bit_errors = hamming(res.info_bits, frame.meta.info_bits);
    m.detected = res.detected;
    m.packet_ok = res.crc_ok;
    if (!genie && res.sync_ok) {
        m.frontend_valid = true;
        m.sync_err_base =
            std::abs(static_cast<double>(res.sync.symbol_start - t1_truth)) / g;
        m.cfo_err_hz = res.cfo.fine_hz - cfo_truth;
    }
    return m;
}

}  // namespace

std::string receiver_name(ReceiverKind kind) {
    switch (kind) {
        case ReceiverKind::Baseline: return "baseline";
        case ReceiverKind::TfiJoint: return "tfi_joint";
        case ReceiverKind::TfiAvg: return "tfi_avg";
    }
    return "?";
}

ReceiverKind parse_receiver(const std::string& name) {
    if (name == "baseline") return ReceiverKind::Baseline;
    if (name == "tfi_joint") return ReceiverKind::TfiJoint;
    if (name == "tfi_avg") return ReceiverKind::TfiAvg;
    throw std::invalid_argument("unknown receiver: " + name);
}

std::vector<TrialMetrics> run_trial(const PointSpec& point, long trial_index,
                                    const SweepSpec& spec, const FrameConfig& config) {
    const uint64_t pk = point_key(point, spec);
    Rng payload_rng(derive_seed(spec.seed, {pk, static_cast<uint64_t>(trial_index), 11}));
    Frame frame = assemble_frame(random_payload(spec.packet_len, payload_rng), point.mcs, config);

    ChannelConfig ch;
    ch.oversampling = point.g;
    ch.snr_db = point.snr_db;
    ch.cfo_hz = spec.cfo_hz;
    ch.taps = spec.taps;
    ch.timing_pad = spec.timing_pad_base * point.g;
    ch.noise_model = spec.noise_model;
    ch.seed = derive_seed(spec.seed, {pk, static_cast<uint64_t>(trial_index), 23});
    ChannelOutput out = run_channel(frame, ch, config);

    const long t1_truth = out.frame_start + 192L * point.g;

    RxOptions rx = spec.rx;
    if (spec.genie_sync) rx.genie = GenieInfo{t1_truth, spec.cfo_hz};

    SampleStream base;
    bool have_base = false;

    std::vector<TrialMetrics> metrics;
    metrics.reserve(spec.receivers.size());
    for (ReceiverKind kind : spec.receivers) {
        DecodeResult res;
        if (kind == ReceiverKind::Baseline) {
            if (!have_base) {
                base = point.g == 1 ? out.rx : decimate(out.rx, point.g);
                have_base = true;
            }
            RxOptions brx = rx;
            if (spec.genie_sync) brx.genie = GenieInfo{t1_truth / point.g, spec.cfo_hz};
            res = decode_baseline(base, point.mcs, spec.packet_len, config, brx);
            metrics.push_back(score(res, frame, t1_truth / point.g, spec.cfo_hz, 1,
                                    spec.genie_sync));
        } else {
            res = decode_frame_tfi(out.rx, point.mcs, spec.packet_len, config, point.g, rx, kind);
            metrics.push_back(
                score(res, frame, t1_truth, spec.cfo_hz, point.g, spec.genie_sync));
        }
    }
    return metrics;
}

SweepReport run_sweep(const SweepSpec& spec, const FrameConfig& config,
                      const std::atomic<bool>* stop,
                      const std::function<void(const std::string&)>& progress) {
    if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    if (spec.snr_db.empty() || spec.g_list.empty() || spec.mcs_list.empty() ||
        spec.receivers.empty())
        throw std::invalid_argument("run_sweep: empty sweep axis");

    SweepReport report;
    int jobs = spec.jobs > 0 ? spec.jobs
                             : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    for (const Mcs& mcs : spec.mcs_list) {
        for (int g : spec.g_list) {
            for (double snr : spec.snr_db) {
                if (stop && stop->load()) return report;
                PointSpec point{mcs, g, snr};
                const auto t_begin = std::chrono::steady_clock::now();

                std::vector<std::vector<TrialMetrics>> slots(spec.trials);
                std::atomic<long> next{0};
                auto worker = [&]() {
                    for (;;) {
                        long t = next.fetch_add(1);
                        if (t >= spec.trials) return;
                        slots[t] = run_trial(point, t, spec, config);
                    }
                };
                if (jobs == 1) {
                    worker();
                } else {
                    std::vector<std::thread> pool;
                    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
                    for (auto& th : pool) th.join();
                }

                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
                        .count();

                for (std::size_t r = 0; r < spec.receivers.size(); ++r) {
                    SweepRow row;
                    row.receiver = spec.receivers[r];
                    row.mcs = mcs;
                    row.g = g;
                    row.noise_model = spec.noise_model;
                    row.snr_db = snr;
                    row.trials = spec.trials;
                    std::vector<double> sync_errs;
                    double cfo_sq = 0.0;
                    long cfo_n = 0;
                    for (long t = 0; t < spec.trials; ++t) {
                        const TrialMetrics& m = slots[t][r];
                        row.bits += m.bits;
                        row.bit_errors += m.bit_errors;
                        row.packets += 1;
                        row.packets_ok += m.packet_ok ? 1 : 0;
                        if (m.frontend_valid) {
                            sync_errs.push_back(m.sync_err_base);
                            cfo_sq += m.cfo_err_hz * m.cfo_err_hz;
                            ++cfo_n;
                        }
                    }
                    row.ber = row.bits ? static_cast<double>(row.bit_errors) / row.bits : 0.0;
                    row.prr = row.packets ? static_cast<double>(row.packets_ok) / row.packets
                                          : 0.0;
                    if (!sync_errs.empty()) {
                        double s = 0.0;
                        for (double e : sync_errs) s += e;
                        row.sync_err_mean = s / sync_errs.size();
                        row.sync_err_median = median_of(sync_errs);
                    }
                    row.cfo_err_hz_rms = cfo_n ? std::sqrt(cfo_sq / cfo_n) : 0.0;
                    row.wall_time_s = elapsed;
                    report.rows.push_back(row);
                }
                if (progress)
                    progress("point mcs=" + mcs_name(mcs) + " G=" + std::to_string(g) +
                             " snr=" + fmt("%.6g", snr) + " done in " + fmt("%.1f", elapsed) +
                             "s");
            }
        }
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        auto key = [](const SweepRow& r) {
            return std::make_tuple(receiver_name(r.receiver), mcs_name(r.mcs), r.g, r.snr_db);
        };
        return key(a) < key(b);
    });
    return report;
}

std::string sweep_csv_header() {
    return "receiver,mcs,coding,G,noise_model,snr_db,trials,bits,bit_errors,ber,packets,"
           "packets_ok,prr,sync_err_mean,sync_err_median,cfo_err_hz_rms,wall_time_s";
}

std::string sweep_report_to_csv(const SweepReport& report) {
    std::string out = sweep_csv_header() + "\n";
    for (const SweepRow& r : report.rows) {
        out += receiver_name(r.receiver) + "," + scheme_name(r.mcs.scheme) + ",";
        out += r.mcs.coding == Coding::HalfRate ? "1/2" : "none";
        out += "," + std::to_string(r.g) + ",";
        out += r.noise_model == NoiseModel::WhitePerSample ? "white" : "bandlimited";
        out += "," + fmt("%.6g", r.snr_db) + "," + std::to_string(r.trials) + "," +
               std::to_string(r.bits) + "," + std::to_string(r.bit_errors) + "," +
               fmt("%.9g", r.ber) + "," + std::to_string(r.packets) + "," +
               std::to_string(r.packets_ok) + "," + fmt("%.9g", r.prr) + "," +
               fmt("%.6g", r.sync_err_mean) + "," + fmt("%.6g", r.sync_err_median) + "," +
               fmt("%.6g", r.cfo_err_hz_rms) + "," + fmt("%.3f", r.wall_time_s) + "\n";
    }
    return out;
}

double theoretical_gain_db(int g) {
    if (g < 1) throw std::invalid_argument("theoretical_gain: G must be >= 1");
    return 10.0 * std::log10(static_cast<double>(g));
}

namespace {

/// First SNR where the interpolated PRR curve reaches the target; NaN when
/// the target is never reached.
double min_snr_for_prr(const std::vector<SweepRow>& sorted_rows, double target) {
    for (std::size_t i = 0; i < sorted_rows.size(); ++i) {
        if (sorted_rows[i].prr >= target) {
            if (i == 0) return sorted_rows[0].snr_db;
            const auto& lo = sorted_rows[i - 1];
            const auto& hi = sorted_rows[i];
            if (hi.prr <= lo.prr) return hi.snr_db;
            double f = (target - lo.prr) / (hi.prr - lo.prr);
            return lo.snr_db + f * (hi.snr_db - lo.snr_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PowerSavingsReport power_savings(const SweepReport& report, double target_prr) {
    PowerSavingsReport out;
    // group rows by (mcs, g) per receiver
    std::vector<std::pair<Mcs, int>> points;
    for (const auto& r : report.rows) {
        auto same = [&](const auto& p) {
            return mcs_name(p.first) == mcs_name(r.mcs) && p.second == r.g;
        };
        if (std::none_of(points.begin(), points.end(), same)) points.push_back({r.mcs, r.g});
    }
    for (const auto& [mcs, g] : points) {
        std::vector<SweepRow> tfi, base;
        for (const auto& r : report.rows) {
            if (mcs_name(r.mcs) != mcs_name(mcs) || r.g != g) continue;
            if (r.receiver == ReceiverKind::TfiJoint) tfi.push_back(r);
            if (r.receiver == ReceiverKind::Baseline) base.push_back(r);
        }
        if (tfi.empty() || base.empty()) continue;
        auto by_snr = [](const SweepRow& a, const SweepRow& b) { return a.snr_db < b.snr_db; };
        std::sort(tfi.begin(), tfi.end(), by_snr);
        std::sort(base.begin(), base.end(), by_snr);

        PowerSavingsRow row;
        row.mcs = mcs;
        row.g = g;
        row.target_prr = target_prr;
        row.min_snr_db = min_snr_for_prr(tfi, target_prr);
        row.baseline_snr_db = min_snr_for_prr(base, target_prr);
        row.reachable = !std::isnan(row.min_snr_db) && !std::isnan(row.baseline_snr_db);
        if (row.reachable) {
            row.delta_db = row.baseline_snr_db - row.min_snr_db;
            row.savings = 1.0 - std::pow(10.0, -row.delta_db / 10.0);
        } else {
            row.delta_db = std::numeric_limits<double>::quiet_NaN();
            row.savings = std::numeric_limits<double>::quiet_NaN();
        }
        out.rows.push_back(row);
    }
    return out;
}

std::string power_csv_header() { return "mcs,G,target_prr,min_snr_db,delta_db,savings_pct"; }

std::string power_report_to_csv(const PowerSavingsReport& report) {
    std::string out = power_csv_header() + "\n";
    for (const auto& r : report.rows) {
        out += mcs_name(r.mcs) + "," + std::to_string(r.g) + "," + fmt("%.6g", r.target_prr) +
               ",";
        if (r.reachable)
            out += fmt("%.6g", r.min_snr_db) + "," + fmt("%.6g", r.delta_db) + "," +
                   fmt("%.9g", r.savings);
        else
            out += "unreachable,unreachable,unreachable";
        out += "\n";
    }
    return out;
}

double snr_at_ber(std::vector<SweepRow> rows, double target_ber) {
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.snr_db < b.snr_db; });
    const double lt = std::log10(target_ber);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].ber <= target_ber) {
            if (i == 0) return rows[0].snr_db;
            double b_lo = std::log10(std::max(rows[i - 1].ber, 1e-12));
            double b_hi = std::log10(std::max(rows[i].ber, 1e-12));
            if (b_hi >= b_lo) return rows[i].snr_db;
            double f = (lt - b_lo) / (b_hi - b_lo);
            return rows[i - 1].snr_db + f * (rows[i].snr_db - rows[i - 1].snr_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double snr_at_prr(std::vector<SweepRow> rows, double target_prr) {
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.snr_db < b.snr_db; });
    return min_snr_for_prr(rows, target_prr);
}

std::vector<std::vector<uint8_t>> run_paired_prr(const Mcs& mcs, double snr_db,
                                                 const std::vector<int>& g_list,
                                                 const SweepSpec& spec,
                                                 const FrameConfig& config) {
    const int g_max = *std::max_element(g_list.begin(), g_list.end());
    std::vector<std::vector<uint8_t>> ok(g_list.size(),
                                         std::vector<uint8_t>(spec.trials, 0));
    PointSpec point{mcs, g_max, snr_db};
    const uint64_t pk = point_key(point, spec);

    for (long t = 0; t < spec.trials; ++t) {
        Rng payload_rng(derive_seed(spec.seed, {pk, static_cast<uint64_t>(t), 11}));
        Frame frame =
            assemble_frame(random_payload(spec.packet_len, payload_rng), mcs, config);
        ChannelConfig ch;
        ch.oversampling = g_max;
        ch.snr_db = snr_db;
        ch.cfo_hz = spec.cfo_hz;
        ch.taps = spec.taps;
        ch.timing_pad = spec.timing_pad_base * g_max;
        ch.noise_model = spec.noise_model;
        ch.seed = derive_seed(spec.seed, {pk, static_cast<uint64_t>(t), 23});
        ChannelOutput out = run_channel(frame, ch, config);

        for (std::size_t gi = 0; gi < g_list.size(); ++gi) {
            const int g = g_list[gi];
            SampleStream view = g == g_max ? out.rx : decimate(out.rx, g_max / g);
            RxOptions rx = spec.rx;
            const long t1 = spec.timing_pad_base * g + 192L * g;
            if (spec.genie_sync) rx.genie = GenieInfo{t1, spec.cfo_hz};
            DecodeResult res = decode_frame_tfi(view, mcs, spec.packet_len, config, g, rx,
                                                ReceiverKind::TfiJoint);
            ok[gi][t] = res.crc_ok ? 1 : 0;
        }
    }
    return ok;
}

IsiPairResult run_paired_isi(const Mcs& mcs, double snr_db, int g, long min_bits,
                             const SweepSpec& spec, const FrameConfig& config) {
    IsiPairResult out;
    PointSpec point{mcs, g, snr_db};
    const uint64_t pk = point_key(point, spec);
    long t = 0;
    while (out.bits < min_bits) {
        Rng payload_rng(derive_seed(spec.seed, {pk, static_cast<uint64_t>(t), 11}));
        Frame frame =
            assemble_frame(random_payload(spec.packet_len, payload_rng), mcs, config);
        ChannelConfig ch;
        ch.oversampling = g;
        ch.snr_db = snr_db;
        ch.taps = spec.taps;
        ch.timing_pad = spec.timing_pad_base * g;
        ch.noise_model = spec.noise_model;
        ch.seed = derive_seed(spec.seed, {pk, static_cast<uint64_t>(t), 23});
        ChannelOutput rx_out = run_channel(frame, ch, config);

        RxOptions rx = spec.rx;
        rx.genie = GenieInfo{ch.timing_pad + 192L * g, 0.0};
        rx.isi_shift = true;
        DecodeResult on = decode_frame_tfi(rx_out.rx, mcs, spec.packet_len, config, g, rx);
        rx.isi_shift = false;
        DecodeResult off = decode_frame_tfi(rx_out.rx, mcs, spec.packet_len, config, g, rx);

        out.bits += static_cast<long>(frame.meta.info_bits.size());
        out.errors_shift_on += hamming(on.info_bits, frame.meta.info_bits);
        out.errors_shift_off += hamming(off.info_bits, frame.meta.info_bits);
        ++t;
    }
    return out;
}

}  // namespace oolink
