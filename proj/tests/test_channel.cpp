#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oolink/channel.hpp"
#include "oolink/decoder.hpp"
#include "oolink/fft.hpp"
#include "oolink/harness.hpp"
#include "oolink/rng.hpp"
#include "oolink/transmitter.hpp"

using namespace oolink;

namespace {
const FrameConfig cfg = FrameConfig::ieee80211ah_2mhz();

SampleStream random_stream(int n, uint64_t seed, double rate = 2e6) {
    Rng rng(seed);
    SampleStream s;
    s.rate_hz = rate;
    s.samples.resize(n);
    for (auto& v : s.samples) v = rng.cgaussian(1.0);
    return s;
}
}  // namespace

TEST_CASE("resample: G=1 identity") {
    SampleStream x = random_stream(256, 1);
    SampleStream y = resample_to_g(x, 1);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x.samples[i] == y.samples[i]);
}

TEST_CASE("resample keeps a pure tone pure") {
    // tone on subcarrier 4 of a 64-sample block
    SampleStream x;
    x.rate_hz = 2e6;
    x.samples.resize(64);
    for (int n = 0; n < 64; ++n) {
        double ph = 2.0 * M_PI * 4.0 * n / 64.0;
        x.samples[n] = cxd(std::cos(ph), std::sin(ph));
    }
    SampleStream y = resample_to_g(x, 2);
    auto spec = dft(y.samples);
    const double peak = std::abs(spec[4]);  // same spectral line in the 2x band
    CHECK(peak > 1.0);
    for (std::size_t b = 0; b < spec.size(); ++b) {
        if (b == 4) continue;
        CHECK(lin_to_db(std::norm(spec[b]) / (peak * peak)) < -120.0);
    }
}

TEST_CASE("resample: decimation recovers the input exactly") {
    SampleStream x = random_stream(300, 2);
    SampleStream y = resample_to_g(x, 4);
    CHECK(y.rate_hz == doctest::Approx(4 * x.rate_hz));
    REQUIRE(y.size() == x.size() * 4);
    SampleStream back = decimate(y, 4);
    double err = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        err = std::max(err, std::abs(back.samples[i] - x.samples[i]));
    CHECK(err < 1e-6);
}

TEST_CASE("resample preserves energy and is linear") {
    SampleStream x = random_stream(200, 3);
    SampleStream y = random_stream(200, 4);
    SampleStream xu = resample_to_g(x, 8);
    double ex = 0, exu = 0;
    for (auto v : x.samples) ex += std::norm(v);
    for (auto v : xu.samples) exu += std::norm(v);
    CHECK(exu == doctest::Approx(8.0 * ex).epsilon(1e-6));

    const cxd a(0.7, -0.3), b(-1.1, 0.4);
    SampleStream mix = x;
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix.samples[i] = a * x.samples[i] + b * y.samples[i];
    SampleStream lhs = resample_to_g(mix, 4);
    SampleStream yu = resample_to_g(y, 4);
    SampleStream xu4 = resample_to_g(x, 4);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(std::abs(lhs.samples[i] - (a * xu4.samples[i] + b * yu.samples[i])) < 1e-9);
}

TEST_CASE("apply_cfo formula, identity, inverse") {
    SampleStream x = random_stream(128, 5);
    SampleStream same = apply_cfo(x, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x.samples[i] == same.samples[i]);

    // offset rate/N over N samples: last sample rotated by 2 pi (N-1)/N
    const int n = int(x.size());
    SampleStream rot = apply_cfo(x, x.rate_hz / n);
    cxd expect = x.samples[n - 1] *
                 cxd(std::cos(2 * M_PI * (n - 1.0) / n), std::sin(2 * M_PI * (n - 1.0) / n));
    CHECK(std::abs(rot.samples[n - 1] - expect) < 1e-10);

    SampleStream back = apply_cfo(apply_cfo(x, 1234.5), -1234.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(back.samples[i] - x.samples[i]) < 1e-10);
}

TEST_CASE("multipath: identity, scalar, convolution oracle, CP budget") {
    SampleStream x = random_stream(100, 7);
    SampleStream id = apply_multipath(x, {{0, cxd(1, 0)}}, cfg, 4);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(id.samples[i] - x.samples[i]) < 1e-15);

    SampleStream sc = apply_multipath(x, {{0, cxd(0, 0.5)}}, cfg, 4);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(sc.samples[i] - cxd(0, 0.5) * x.samples[i]) < 1e-15);

    std::vector<ChannelTap> taps = {{0, cxd(1, 0)}, {5, cxd(0.4, -0.2)}};
    SampleStream y = apply_multipath(x, taps, cfg, 4);
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxd want = x.samples[i];
        if (i >= 5) want += cxd(0.4, -0.2) * x.samples[i - 5];
        CHECK(std::abs(y.samples[i] - want) < 1e-12);
    }

    // delay must stay under cp_len*G - (G-1) = 16*4 - 3 = 61
    CHECK_THROWS(apply_multipath(x, {{0, cxd(1, 0)}, {61, cxd(0.1, 0)}}, cfg, 4));
    CHECK_THROWS(apply_multipath(x, {{3, cxd(1, 0)}}, cfg, 4));
    CHECK_THROWS(apply_multipath(x, {}, cfg, 4));
}

TEST_CASE("noise: infinite SNR is a no-op; white variance calibrated") {
    SampleStream x = random_stream(64, 9);
    ChannelConfig ch;
    ch.snr_db = kInfSnrDb;
    Rng rng(1);
    SampleStream y = add_noise(x, ch, rng);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x.samples[i] == y.samples[i]);

    SampleStream zeros;
    zeros.rate_hz = 2e6;
    zeros.samples.assign(1000000, cxd(0, 0));
    ch.snr_db = 7.0;
    Rng rng2(2);
    SampleStream n = add_noise(zeros, ch, rng2);
    double var = mean_power(n.samples);
    CHECK(var == doctest::Approx(ch.es_reference * db_to_lin(-7.0)).epsilon(0.01));
}

TEST_CASE("bandlimited noise: strong correlation at one base-sample lag") {
    ChannelConfig ch;
    ch.snr_db = 0.0;
    ch.noise_model = NoiseModel::BandLimited;
    ch.oversampling = 4;
    SampleStream zeros;
    zeros.rate_hz = 8e6;
    zeros.samples.assign(1 << 20, cxd(0, 0));
    Rng rng(3);
    SampleStream n = add_noise(zeros, ch, rng);

    cxd lag0(0, 0), lagg(0, 0);
    for (std::size_t i = 0; i + 4 < n.size(); ++i) {
        lag0 += n.samples[i] * std::conj(n.samples[i]);
        lagg += n.samples[i] * std::conj(n.samples[i + 4]);
    }
    CHECK(std::abs(lagg) > 0.5 * std::abs(lag0));
    CHECK(mean_power(n.samples) == doctest::Approx(ch.es_reference).epsilon(0.01));
}

namespace {

// Measured SNR after coherently combining the G phase-compensated copies of
// known payload symbols, relative to the per-copy SNR.
double combining_gain_db(NoiseModel model, int g, double snr_db, int n_frames,
                         uint64_t seed) {
    double sig = 0, err = 0;
    for (int f = 0; f < n_frames; ++f) {
        Rng rng(derive_seed(seed, {static_cast<uint64_t>(f)}));
        std::vector<uint8_t> payload(40);
        for (auto& b : payload) b = rng.next_u64() & 0xFF;
        Frame frame = assemble_frame(payload, {ModScheme::Qpsk, Coding::None}, cfg);

        ChannelConfig ch;
        ch.oversampling = g;
        ch.snr_db = snr_db;
        ch.noise_model = model;
        ch.timing_pad = 160 * g;
        ch.seed = derive_seed(seed, {static_cast<uint64_t>(f), 2});
        ChannelOutput out = run_channel(frame, ch, cfg);

        // clean reference: same pipeline without noise
        ChannelConfig clean = ch;
        clean.snr_db = kInfSnrDb;
        ChannelOutput ref = run_channel(frame, clean, cfg);

        const long t1 = ch.timing_pad + 192L * g;
        for (int s = 0; s < frame.meta.n_payload_symbols; ++s) {
            SymbolCopies noisy = extract_copies(out.rx, t1, s, cfg, g, true);
            SymbolCopies ideal = extract_copies(ref.rx, t1, s, cfg, g, true);
            for (int k : cfg.data_subcarriers) {
                const int b = cfg.bin(k);
                cxd acc(0, 0), acc_ref(0, 0);
                for (int q = 0; q < g; ++q) {
                    acc += noisy.bins[q][b];
                    acc_ref += ideal.bins[q][b];
                }
                acc /= double(g);
                acc_ref /= double(g);
                sig += std::norm(acc_ref);
                err += std::norm(acc - acc_ref);
            }
        }
    }
    return lin_to_db(sig / err);
}

}  // namespace

TEST_CASE("white noise: combining G copies gains 10log10(G) within 0.5 dB") {
    // per-copy SNR at the FFT output for this layout
    const double bin_snr = combining_gain_db(NoiseModel::WhitePerSample, 1, 10.0, 30, 101);
    for (int g : {2, 4, 8}) {
        double snr_g = combining_gain_db(NoiseModel::WhitePerSample, g, 10.0, 30, 101 + g);
        CHECK(snr_g - bin_snr ==
              doctest::Approx(theoretical_gain_db(g)).epsilon(0.15));
        CHECK(std::abs(snr_g - bin_snr - theoretical_gain_db(g)) < 0.5);
    }
}

TEST_CASE("bandlimited noise: combining gain collapses for G >= 4") {
    const double bin_snr = combining_gain_db(NoiseModel::BandLimited, 1, 10.0, 30, 201);
    for (int g : {4, 8}) {
        double snr_g = combining_gain_db(NoiseModel::BandLimited, g, 10.0, 30, 201 + g);
        CHECK(snr_g - bin_snr < theoretical_gain_db(g) - 1.0);
    }
}

TEST_CASE("run_channel: verbatim after pad when impairments are off") {
    Frame frame = assemble_frame({1, 2, 3, 4}, {ModScheme::Qpsk, Coding::None}, cfg);
    ChannelConfig ch;
    ch.oversampling = 1;
    ch.timing_pad = 50;
    ChannelOutput out = run_channel(frame, ch, cfg);
    SampleStream tx = frame.concat();
    REQUIRE(out.rx.size() == tx.size() + 50);
    CHECK(out.frame_start == 50);
    for (int i = 0; i < 50; ++i) CHECK(std::abs(out.rx.samples[i]) == 0.0);
    for (std::size_t i = 0; i < tx.size(); ++i)
        CHECK(std::abs(out.rx.samples[50 + i] - tx.samples[i]) < 1e-15);
}

TEST_CASE("run_channel is deterministic for a fixed seed") {
    Frame frame = assemble_frame({9, 9, 9}, {ModScheme::Qam16, Coding::None}, cfg);
    ChannelConfig ch;
    ch.oversampling = 4;
    ch.snr_db = 5.0;
    ch.cfo_hz = 300.0;
    ch.timing_pad = 123 * 4;
    ch.seed = 4242;
    ChannelOutput a = run_channel(frame, ch, cfg);
    ChannelOutput b = run_channel(frame, ch, cfg);
    REQUIRE(a.rx.size() == b.rx.size());
    for (std::size_t i = 0; i < a.rx.size(); ++i) CHECK(a.rx.samples[i] == b.rx.samples[i]);
}

TEST_CASE("G=8 ideal channel decodes via decimation + baseline with zero errors") {
    auto payload = std::vector<uint8_t>{0xDE, 0xAD, 0xBE, 0xEF, 0x42};
    Frame frame = assemble_frame(payload, {ModScheme::Qam16, Coding::None}, cfg);
    ChannelConfig ch;
    ch.oversampling = 8;
    ch.timing_pad = 200 * 8;
    ChannelOutput out = run_channel(frame, ch, cfg);
    SampleStream base = decimate(out.rx, 8);
    DecodeResult res = decode_baseline(base, frame.meta.mcs, 5, cfg);
    CHECK(res.crc_ok);
    CHECK(res.payload == payload);
}
