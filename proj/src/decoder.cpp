#include "oolink/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oolink/convcode.hpp"
#include "oolink/crc32.hpp"
#include "oolink/fft.hpp"
#include "oolink/transmitter.hpp"

namespace oolink {

long ltf_window_start(long ltf_block1_start, int block, int g, bool isi_shift) {
    return ltf_block1_start + 64L * block * g - (isi_shift ? g - 1 : 0);
}

long payload_window_start(long ltf_block1_start, int symbol_index, int g, bool isi_shift) {
    return ltf_block1_start + 128L * g + 80L * symbol_index * g + 16L * g -
           (isi_shift ? g - 1 : 0);
}

TimeCopyMatrix extract_time_copies(const SampleStream& stream, long window_start, int g) {
    if (window_start < 0 ||
        window_start + static_cast<long>(64) * g > static_cast<long>(stream.size()))
        throw std::runtime_error("extract_time_copies: stream too short for symbol window");
    TimeCopyMatrix copies(g, std::vector<cxd>(64));
    for (int q = 0; q < g; ++q)
        for (int n = 0; n < 64; ++n)
            copies[q][n] = stream.samples[window_start + q + static_cast<long>(g) * n];
    return copies;
}

SymbolCopies extract_copies_at(const SampleStream& stream, long window_start, int g,
                               const FrameConfig& config, int symbol_index) {
    TimeCopyMatrix time_copies = extract_time_copies(stream, window_start, g);
    SymbolCopies out;
    out.g = g;
    out.symbol_index = symbol_index;
    out.bins.resize(g);
    for (int q = 0; q < g; ++q) {
        out.bins[q] = fft64(time_copies[q]);
        if (q == 0) continue;
        for (int b = 0; b < 64; ++b) {
            const int k = config.signed_index(b);
            const double ph = -2.0 * M_PI * k * q / (64.0 * g);
            out.bins[q][b] *= cxd(std::cos(ph), std::sin(ph));
        }
    }
    return out;
}

SymbolCopies extract_copies(const SampleStream& stream, long ltf_block1_start, int symbol_index,
                            const FrameConfig& config, int g, bool isi_shift) {
    return extract_copies_at(stream,
                             payload_window_start(ltf_block1_start, symbol_index, g, isi_shift),
                             g, config, symbol_index);
}

std::vector<int> decode_joint_ml(const SymbolCopies& copies, const NoiseMap& map,
                                 const FrameConfig& config, ModScheme scheme) {
    const Constellation& c = Constellation::get(scheme);
    std::vector<int> decisions(config.data_subcarriers.size(), 0);
    for (std::size_t i = 0; i < config.data_subcarriers.size(); ++i) {
        double best_ll = -std::numeric_limits<double>::infinity();
        int best = 0;
        const int b = config.bin(config.data_subcarriers[i]);
        for (int p = 0; p < static_cast<int>(c.points.size()); ++p) {
            double ll = 0.0;
            for (int q = 0; q < copies.g; ++q)
                ll += std::log(likelihood(map, static_cast<int>(i), copies.bins[q][b],
                                          c.points[p], config));
            if (ll > best_ll) {
                best_ll = ll;
                best = p;
            }
        }
        decisions[i] = best;
    }
    return decisions;
}

std::vector<int> decode_average_nn(const SymbolCopies& copies, const NoiseMap& map,
                                   const FrameConfig& config, ModScheme scheme) {
    std::vector<int> decisions(config.data_subcarriers.size(), 0);
    for (std::size_t i = 0; i < config.data_subcarriers.size(); ++i) {
        const int b = config.bin(config.data_subcarriers[i]);
        cxd h = map.channel[b];
        if (std::abs(h) < 1e-12) h = cxd(1e-12, 0.0);
        cxd acc(0.0, 0.0);
        for (int q = 0; q < copies.g; ++q) acc += copies.bins[q][b] / h;
        decisions[i] = nearest_point(acc / static_cast<double>(copies.g), scheme);
    }
    return decisions;
}

namespace {

/// Unwrap raw per-symbol pilot angles and fit a line over the symbol index.
std::vector<double> fit_pilot_ramp(const std::vector<double>& raw) {
    const std::size_t n = raw.size();
    std::vector<double> unwrapped(n);
    double offset = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (s > 0) {
            double d = raw[s] - raw[s - 1];
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            offset += d;
            unwrapped[s] = unwrapped[0] + offset;
        } else {
            unwrapped[0] = raw[0];
        }
    }
    if (n < 3) return unwrapped;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t s = 0; s < n; ++s) {
        sx += s;
        sy += unwrapped[s];
        sxx += double(s) * s;
        sxy += s * unwrapped[s];
    }
    const double denom = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    std::vector<double> fitted(n);
    for (std::size_t s = 0; s < n; ++s) fitted[s] = a + b * s;
    return fitted;
}

void rotate_copies(SymbolCopies& copies, double theta) {
    if (theta == 0.0) return;
    const cxd r(std::cos(-theta), std::sin(-theta));
    for (auto& row : copies.bins)
        for (auto& v : row) v *= r;
}

DecodeResult failed_result(const Mcs& mcs, int payload_len, DetectionResult det) {
    DecodeResult res;
    res.detected = det.detected;
    res.detection = std::move(det);
    res.sync_ok = false;
    res.crc_ok = false;
    res.info_bits.assign(static_cast<std::size_t>(payload_len + 4) * 8, 0);
    (void)mcs;
    return res;
}

}  // namespace

DecodeResult decode_frame_tfi(const SampleStream& stream, const Mcs& mcs, int payload_len,
                              const FrameConfig& config, int g, const RxOptions& opts,
                              ReceiverKind kind) {
    if (kind == ReceiverKind::Baseline && g != 1)
        throw std::invalid_argument("baseline receiver runs at the base clock rate");

    const int n_sym = n_payload_symbols(payload_len, mcs, config);
    DecodeResult res;
    long t1 = 0;
    SampleStream work;

    if (opts.genie) {
        res.detected = true;
        res.sync_ok = true;
        t1 = opts.genie->symbol_start;
        work = compensate_cfo(stream, opts.genie->cfo_hz);
        res.cfo.coarse_hz = opts.genie->cfo_hz;
        res.cfo.fine_hz = opts.genie->cfo_hz;
        res.sync.symbol_start = t1;
        res.sync.ok = true;
    } else {
        SampleStream base = g == 1 ? stream : decimate(stream, g);
        DetectOptions det_opts = opts.detect;
        det_opts.keep_trace = opts.keep_traces || det_opts.keep_trace;
        DetectionResult det = detect_packet(base, det_opts);
        if (!det.detected) return failed_result(mcs, payload_len, std::move(det));

        long valid_from = model_clock_switch(det, config, g, opts.clock_switch_s);

        SampleStream ref = build_reference_ltf(config, g);
        SyncResult sync;
        try {
            sync = sync_timing(stream, ref, det.coarse_start, g, valid_from, opts.keep_traces);
        } catch (const std::runtime_error&) {
            return failed_result(mcs, payload_len, std::move(det));
        }
        t1 = sync.symbol_start;

        // frame must fit behind the sync point
        const long needed = payload_window_start(t1, n_sym - 1, g, opts.isi_shift) + 64L * g;
        if (needed > static_cast<long>(stream.size())) {
            DecodeResult bad = failed_result(mcs, payload_len, std::move(det));
            bad.sync = std::move(sync);
            return bad;
        }

        res.detected = true;
        res.sync_ok = true;
        res.detection = std::move(det);

        double coarse = estimate_cfo_coarse(stream, t1, g, config);
        SampleStream after_coarse = compensate_cfo(stream, coarse);

        CfoEstimate cfo;
        cfo.coarse_hz = coarse;
        cfo.fine_hz = coarse;
        if (g >= 2) {
            std::vector<TimeCopyMatrix> cfo_symbols;
            for (int blk = 0; blk < 2; ++blk)
                cfo_symbols.push_back(extract_time_copies(
                    after_coarse, ltf_window_start(t1, blk, g, opts.isi_shift), g));
            const int extra = std::min(n_sym, opts.fine_cfo_payload_symbols);
            for (int s = 0; s < extra; ++s)
                cfo_symbols.push_back(extract_time_copies(
                    after_coarse, payload_window_start(t1, s, g, opts.isi_shift), g));
            cfo = estimate_cfo_fine(cfo_symbols, coarse, config, g, opts.fine_cfo);
        }
        res.cfo = cfo;
        res.sync = std::move(sync);
        work = compensate_cfo(after_coarse, cfo.fine_hz - coarse);
    }

    // noise map from the two LTF blocks
    SymbolCopies ltf0 = extract_copies_at(work, ltf_window_start(t1, 0, g, opts.isi_shift), g,
                                          config, -2);
    SymbolCopies ltf1 = extract_copies_at(work, ltf_window_start(t1, 1, g, opts.isi_shift), g,
                                          config, -1);
    NoiseMap map = build_noise_map(ltf0, ltf1, config, opts.map_mode);

    // expected per-copy pilot values after equalization are the pilots themselves
    std::vector<int> pilot_bins;
    std::vector<cxd> pilot_expected;
    for (std::size_t p = 0; p < config.pilot_subcarriers.size(); ++p) {
        pilot_bins.push_back(config.bin(config.pilot_subcarriers[p]));
        pilot_expected.push_back(cxd(config.pilot_values[p], 0.0));
    }

    const bool joint = kind == ReceiverKind::TfiJoint && g > 1;
    std::vector<uint8_t> coded_bits;
    coded_bits.reserve(static_cast<std::size_t>(n_sym) * config.data_subcarriers.size() *
                       bits_per_symbol(mcs.scheme));

    // first pass: copies and raw per-symbol pilot angles
    std::vector<SymbolCopies> symbols;
    symbols.reserve(n_sym);
    std::vector<double> raw_theta(n_sym, 0.0);
    for (int s = 0; s < n_sym; ++s) {
        symbols.push_back(extract_copies(work, t1, s, config, g, opts.isi_shift));
        std::vector<cxd> obs, expect;
        for (int q = 0; q < g; ++q)
            for (std::size_t p = 0; p < pilot_bins.size(); ++p) {
                cxd h = map.channel[pilot_bins[p]];
                if (std::abs(h) < 1e-12) h = cxd(1e-12, 0.0);
                obs.push_back(symbols.back().bins[q][pilot_bins[p]] / h);
                expect.push_back(pilot_expected[p]);
            }
        raw_theta[s] = track_phase_pilots(obs, expect);
    }

    // residual CFO makes the common phase a straight line in the symbol
    // index; a least-squares fit over the frame removes most of the
    // per-symbol pilot noise while tracking the ramp
    res.pilot_phase = fit_pilot_ramp(raw_theta);

    for (int s = 0; s < n_sym; ++s) {
        SymbolCopies& copies = symbols[s];
        rotate_copies(copies, res.pilot_phase[s]);

        // at G=1 (and for the averaging receiver) this is equalize + nearest,
        // which is exactly what joint ML reduces to under a symmetric map
        std::vector<int> decisions = joint ? decode_joint_ml(copies, map, config, mcs.scheme)
                                           : decode_average_nn(copies, map, config, mcs.scheme);
        for (int d : decisions) point_bits(d, mcs.scheme, coded_bits);
        if (opts.keep_traces) res.copies_dump.push_back(copies);
        res.decisions.push_back(std::move(decisions));
    }

    const std::size_t info_len = static_cast<std::size_t>(payload_len + 4) * 8;
    std::vector<uint8_t> info;
    if (mcs.coding == Coding::HalfRate) {
        coded_bits.resize(info_len * 2);
        info = viterbi_decode(coded_bits);
    } else {
        coded_bits.resize(info_len);
        info = std::move(coded_bits);
    }
    res.info_bits = info;

    std::vector<uint8_t> bytes = bits_to_bytes(info);
    res.payload.assign(bytes.begin(), bytes.begin() + payload_len);
    uint32_t rx_crc = 0;
    for (int i = 0; i < 4; ++i)
        rx_crc |= static_cast<uint32_t>(bytes[payload_len + i]) << (8 * i);
    res.crc_ok = crc32(res.payload) == rx_crc;
    return res;
}

DecodeResult decode_baseline(const SampleStream& base_stream, const Mcs& mcs, int payload_len,
                             const FrameConfig& config, const RxOptions& opts) {
    return decode_frame_tfi(base_stream, mcs, payload_len, config, 1, opts,
                            ReceiverKind::Baseline);
}

}  // namespace oolink
