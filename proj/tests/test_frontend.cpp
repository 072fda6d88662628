#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oolink/channel.hpp"
#include "oolink/decoder.hpp"
#include "oolink/fft.hpp"
#include "oolink/frontend.hpp"
#include "oolink/rng.hpp"
#include "oolink/transmitter.hpp"

using namespace oolink;

namespace {
const FrameConfig cfg = FrameConfig::ieee80211ah_2mhz();

Frame test_frame(uint64_t seed, const Mcs& mcs = {ModScheme::Qpsk, Coding::None},
                 int len = 40) {
    Rng rng(seed);
    std::vector<uint8_t> payload(len);
    for (auto& b : payload) b = rng.next_u64() & 0xFF;
    return assemble_frame(payload, mcs, cfg);
}

ChannelOutput run(const Frame& frame, int g, double snr_db, double cfo_hz, uint64_t seed,
                  int pad_base = 400) {
    ChannelConfig ch;
    ch.oversampling = g;
    ch.snr_db = snr_db;
    ch.cfo_hz = cfo_hz;
    ch.timing_pad = pad_base * g;
    ch.seed = seed;
    return run_channel(frame, ch, cfg);
}

SampleStream noise_only(int n, uint64_t seed) {
    Rng rng(seed);
    SampleStream s;
    s.rate_hz = cfg.base_rate_hz;
    s.samples.resize(n);
    for (auto& v : s.samples) v = rng.cgaussian(1.0);
    return s;
}

}  // namespace

TEST_CASE("detection: pure noise stays quiet at threshold 0.8") {
    int false_alarms = 0;
    for (int t = 0; t < 1000; ++t)
        if (detect_packet(noise_only(2000, 1000 + t)).detected) ++false_alarms;
    CHECK(false_alarms < 10);  // < 1%
}

TEST_CASE("detection: clean frame forms an exact plateau") {
    Frame frame = test_frame(1);
    ChannelOutput out = run(frame, 1, kInfSnrDb, 0.0, 7);
    DetectOptions opts;
    opts.keep_trace = true;
    DetectionResult det = detect_packet(out.rx, opts);
    REQUIRE(det.detected);
    CHECK(det.coarse_start <= 400);
    // repetitions are exact inside the STF proper
    for (long k = 400; k <= 400 + 16; ++k)
        CHECK(det.metric_trace[k] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("detection probability > 99% at 10 dB") {
    Frame frame = test_frame(2);
    int detected = 0;
    for (int t = 0; t < 1000; ++t) {
        ChannelOutput out = run(frame, 1, 10.0, 0.0, 5000 + t);
        if (detect_packet(out.rx).detected) ++detected;
    }
    CHECK(detected >= 990);
}

TEST_CASE("clock switch budget arithmetic") {
    DetectionResult det;
    det.detected = true;
    det.coarse_start = 400;
    // zero latency: valid from the start of repetition 10
    CHECK(model_clock_switch(det, cfg, 4, 0.0) == (400 + 144) * 4);
    // 8 us at 2 MHz = 16 samples = exactly one repetition -> LTF start
    CHECK(model_clock_switch(det, cfg, 4, 8e-6) == (400 + 160) * 4);
    // 20 us exceeds the tenth repetition
    CHECK_THROWS(model_clock_switch(det, cfg, 4, 20e-6));
    DetectionResult none;
    CHECK_THROWS(model_clock_switch(none, cfg, 4, 0.0));
}

TEST_CASE("reference LTF: G=1 equals a transmitted LTF block") {
    SampleStream ref = build_reference_ltf(cfg, 1);
    SampleStream ltf = build_ltf(cfg);
    REQUIRE(ref.size() == 64);
    for (int n = 0; n < 64; ++n)
        CHECK(std::abs(ref.samples[n] - ltf.samples[32 + n]) < 1e-12);
}

TEST_CASE("reference LTF: decimating the G=8 reference gives the G=1 one") {
    SampleStream r8 = build_reference_ltf(cfg, 8);
    SampleStream r1 = build_reference_ltf(cfg, 1);
    REQUIRE(r8.size() == 512);
    for (int n = 0; n < 64; ++n)
        CHECK(std::abs(r8.samples[8 * n] - r1.samples[n]) < 1e-10);

    double e1 = 0, e8 = 0;
    for (auto v : r1.samples) e1 += std::norm(v);
    for (auto v : r8.samples) e8 += std::norm(v);
    // normalized to unit energy, references for every G coincide in scale
    CHECK(e8 / 8.0 == doctest::Approx(e1).epsilon(1e-9));
}

TEST_CASE("sync: noiseless timing error is zero at every G") {
    Frame frame = test_frame(3);
    for (int g : {1, 2, 4, 8}) {
        ChannelOutput out = run(frame, g, kInfSnrDb, 0.0, 11);
        DetectionResult det = detect_packet(g == 1 ? out.rx : decimate(out.rx, g));
        REQUIRE(det.detected);
        SampleStream ref = build_reference_ltf(cfg, g);
        SyncResult sync = sync_timing(out.rx, ref, det.coarse_start, g);
        const long truth = out.frame_start + 192L * g;
        CHECK(sync.symbol_start == truth);
        CHECK(sync.peak_value > 0.98);
        CHECK(sync.peak_value <= 1.0 + 1e-9);
    }
}

TEST_CASE("sync: shifting the input shifts the peak equally") {
    Frame frame = test_frame(4);
    ChannelOutput out = run(frame, 4, 20.0, 0.0, 13);
    SampleStream ref = build_reference_ltf(cfg, 4);
    DetectionResult det = detect_packet(decimate(out.rx, 4));
    REQUIRE(det.detected);
    SyncResult a = sync_timing(out.rx, ref, det.coarse_start, 4);

    SampleStream shifted;
    shifted.rate_hz = out.rx.rate_hz;
    shifted.samples.assign(5, cxd(0, 0));
    shifted.samples.insert(shifted.samples.end(), out.rx.samples.begin(), out.rx.samples.end());
    SyncResult b = sync_timing(shifted, ref, det.coarse_start, 4);
    CHECK(b.symbol_start == a.symbol_start + 5);
}

TEST_CASE("sync: oversampling shrinks the timing error at 9 dB") {
    // smaller companion of the acceptance criterion
    const int trials = 120;
    std::vector<double> err1, err8;
    for (int t = 0; t < trials; ++t) {
        Frame frame = test_frame(100 + t);
        for (int g : {1, 8}) {
            ChannelOutput out = run(frame, g, 9.0, 0.0, 9000 + t);
            DetectionResult det = detect_packet(g == 1 ? out.rx : decimate(out.rx, g));
            if (!det.detected) continue;  // counted as packet loss, not timing error
            SampleStream ref = build_reference_ltf(cfg, g);
            SyncResult sync = sync_timing(out.rx, ref, det.coarse_start, g,
                                          model_clock_switch(det, cfg, g));
            double e = std::abs(double(sync.symbol_start - (out.frame_start + 192L * g))) / g;
            (g == 1 ? err1 : err8).push_back(e);
        }
    }
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    CHECK(med(err8) <= med(err1));
    double mean8 = 0;
    for (double e : err8) mean8 += e;
    CHECK(mean8 / err8.size() <= 2.0);
}

TEST_CASE("coarse CFO: zero, exact quarter rotation, aliasing boundary") {
    Frame frame = test_frame(5);
    ChannelOutput clean = run(frame, 2, kInfSnrDb, 0.0, 17);
    const long t1 = clean.frame_start + 192L * 2;
    CHECK(std::abs(estimate_cfo_coarse(clean.rx, t1, 2, cfg)) < 1e-9);

    // rate/256 gives a pi/2 block-to-block rotation, estimated exactly
    const double f = cfg.base_rate_hz / 256.0;
    ChannelOutput rot = run(frame, 2, kInfSnrDb, f, 17);
    CHECK(estimate_cfo_coarse(rot.rx, t1, 2, cfg) == doctest::Approx(f).epsilon(1e-9));

    // beyond rate/128 the estimate aliases
    const double beyond = cfg.base_rate_hz / 128.0 * 1.5;
    ChannelOutput ali = run(frame, 2, kInfSnrDb, beyond, 17);
    double est = estimate_cfo_coarse(ali.rx, t1, 2, cfg);
    CHECK(std::abs(est - beyond) > cfg.base_rate_hz / 256.0);
    CHECK(std::abs(est - (beyond - cfg.base_rate_hz / 64.0)) < 1.0);
}

TEST_CASE("fine CFO: zero offset gives zero residual on a periodic stream") {
    // a lone periodically-extended symbol is the regime where the copy
    // relation is exact
    Rng rng(31);
    std::vector<cxd> bins(64, cxd(0, 0));
    for (int k : cfg.data_subcarriers)
        bins[cfg.bin(k)] = Constellation::get(ModScheme::Qpsk).points[rng.next_u64() % 4];
    std::vector<cxd> core = idft(bins);
    SampleStream base;
    base.rate_hz = cfg.base_rate_hz;
    base.samples = core;
    const int g = 4;
    SampleStream up = resample_to_g(base, g);  // circular: exact periodic interpolation

    // tile three periods so shifted windows have room
    SampleStream tiled;
    tiled.rate_hz = up.rate_hz;
    for (int r = 0; r < 3; ++r)
        tiled.samples.insert(tiled.samples.end(), up.samples.begin(), up.samples.end());

    std::vector<TimeCopyMatrix> sym = {extract_time_copies(tiled, 64 * g, g)};
    // the objective itself vanishes at the true offset
    CHECK(fine_cfo_objective(sym, 0.0, cfg, g) < 1e-9);
    CfoEstimate est = estimate_cfo_fine(sym, 0.0, cfg, g);
    CHECK(est.fine_applicable);
    CHECK(std::abs(est.fine_hz) < 1e-3 * cfg.subcarrier_spacing_hz());
}

TEST_CASE("fine CFO: injected offset recovered on a periodic stream") {
    Rng rng(37);
    std::vector<cxd> bins(64, cxd(0, 0));
    for (int k : cfg.data_subcarriers)
        bins[cfg.bin(k)] = Constellation::get(ModScheme::Qam16).points[rng.next_u64() % 16];
    std::vector<cxd> core = idft(bins);
    SampleStream base;
    base.rate_hz = cfg.base_rate_hz;
    base.samples = core;
    const int g = 8;
    SampleStream up = resample_to_g(base, g);
    SampleStream tiled;
    tiled.rate_hz = up.rate_hz;
    for (int r = 0; r < 4; ++r)
        tiled.samples.insert(tiled.samples.end(), up.samples.begin(), up.samples.end());

    const double spacing = cfg.subcarrier_spacing_hz();
    for (double frac : {0.004, -0.012, 0.018}) {
        const double truth = frac * spacing;
        SampleStream rot = apply_cfo(tiled, truth);
        std::vector<TimeCopyMatrix> sym = {extract_time_copies(rot, 64 * g, g),
                                           extract_time_copies(rot, 2 * 64 * g, g)};
        CfoEstimate est = estimate_cfo_fine(sym, 0.0, cfg, g);
        CHECK(std::abs(est.fine_hz - truth) < 1e-3 * spacing);

        // dense-grid oracle: the returned offset matches a brute search
        FineCfoOptions dense;
        dense.grid_points = 4096;
        CfoEstimate oracle = estimate_cfo_fine(sym, 0.0, cfg, g, dense);
        CHECK(std::abs(oracle.fine_hz - truth) < 1e-3 * spacing);
    }
}

TEST_CASE("fine CFO is a pass-through at G=1") {
    std::vector<TimeCopyMatrix> sym = {TimeCopyMatrix(1, std::vector<cxd>(64))};
    CfoEstimate est = estimate_cfo_fine(sym, 123.0, cfg, 1);
    CHECK_FALSE(est.fine_applicable);
    CHECK(est.fine_hz == 123.0);
}

TEST_CASE("compensate_cfo inverts apply_cfo") {
    SampleStream x = noise_only(500, 77);
    SampleStream back = compensate_cfo(apply_cfo(x, 812.5), 812.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(back.samples[i] - x.samples[i]) < 1e-9);
    SampleStream same = compensate_cfo(x, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.samples[i] == x.samples[i]);
}

TEST_CASE("pilot phase tracking") {
    std::vector<cxd> expected = {cxd(1, 0), cxd(1, 0), cxd(1, 0), cxd(1, 0)};
    CHECK(track_phase_pilots(expected, expected) == doctest::Approx(0.0));

    std::vector<cxd> rotated;
    const cxd r(std::cos(M_PI / 8), std::sin(M_PI / 8));
    for (auto p : expected) rotated.push_back(p * r);
    CHECK(track_phase_pilots(rotated, expected) == doctest::Approx(M_PI / 8).epsilon(1e-12));
}

TEST_CASE("pilot corrections ramp monotonically under residual CFO") {
    Frame frame = test_frame(6, {ModScheme::Qpsk, Coding::None}, 100);
    const int g = 2;
    const double residual = 40.0;  // Hz, small enough to leave in place
    ChannelOutput out = run(frame, g, kInfSnrDb, residual, 19);

    RxOptions rx;
    rx.genie = GenieInfo{out.frame_start + 192L * g, 0.0};  // leave the CFO in
    DecodeResult res = decode_frame_tfi(out.rx, frame.meta.mcs, 100, cfg, g, rx);
    REQUIRE(res.pilot_phase.size() >= 4);
    for (std::size_t i = 1; i < res.pilot_phase.size(); ++i)
        CHECK(res.pilot_phase[i] > res.pilot_phase[i - 1]);
    CHECK(res.crc_ok);  // tracking absorbs the ramp
}
