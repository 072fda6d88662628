#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oolink/constellation.hpp"
#include "oolink/convcode.hpp"
#include "oolink/crc32.hpp"
#include "oolink/fft.hpp"
#include "oolink/rng.hpp"

using namespace oolink;

namespace {

// Independent O(N^2) DFT used as the oracle for the FFT path.
std::vector<cxd> dft_reference(const std::vector<cxd>& x) {
    const std::size_t n = x.size();
    std::vector<cxd> out(n, cxd(0, 0));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m) {
            double ph = -2.0 * M_PI * double(m) * double(l) / double(n);
            out[l] += x[m] * cxd(std::cos(ph), std::sin(ph));
        }
    return out;
}

double max_err(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

TEST_CASE("constellation mapping table") {
    // BPSK bit 1 -> +1
    auto b = modulate_bits({1}, ModScheme::Bpsk);
    CHECK(std::abs(b[0] - cxd(1, 0)) < 1e-15);
    auto b0 = modulate_bits({0}, ModScheme::Bpsk);
    CHECK(std::abs(b0[0] - cxd(-1, 0)) < 1e-15);

    // QPSK 00 -> (-1-1j)/sqrt(2)
    auto q = modulate_bits({0, 0}, ModScheme::Qpsk);
    CHECK(std::abs(q[0] - cxd(-1, -1) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("constellation normalization: mean power 1 within 1e-12") {
    for (auto s : {ModScheme::Bpsk, ModScheme::Qpsk, ModScheme::Qam16, ModScheme::Qam64}) {
        const auto& c = Constellation::get(s);
        CHECK(int(c.points.size()) == (1 << c.bits_per_symbol));
        double p = 0;
        for (auto pt : c.points) p += std::norm(pt);
        p /= c.points.size();
        CHECK(std::abs(p - 1.0) < 1e-12);
    }
}

TEST_CASE("constellation Gray adjacency: axis neighbors differ in one bit") {
    for (auto s : {ModScheme::Qam16, ModScheme::Qam64}) {
        const auto& c = Constellation::get(s);
        const int n = int(c.points.size());
        const double step = 2.0 / std::sqrt(s == ModScheme::Qam16 ? 10.0 : 42.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                cxd d = c.points[i] - c.points[j];
                bool i_neighbor =
                    std::abs(d.imag()) < 1e-12 && std::abs(std::abs(d.real()) - step) < 1e-9;
                bool q_neighbor =
                    std::abs(d.real()) < 1e-12 && std::abs(std::abs(d.imag()) - step) < 1e-9;
                if (i_neighbor || q_neighbor) CHECK(__builtin_popcount(i ^ j) == 1);
            }
        }
    }
}

TEST_CASE("modulate_bits rejects bad lengths") {
    CHECK_THROWS(modulate_bits({1, 0, 1}, ModScheme::Qpsk));
}

TEST_CASE("nearest_point basics") {
    // exact point in -> same point out
    const auto& c = Constellation::get(ModScheme::Qam64);
    for (int i = 0; i < 64; ++i) CHECK(nearest_point(c.points[i], ModScheme::Qam64) == i);

    // QPSK first quadrant
    int idx = nearest_point(cxd(0.1, 0.2), ModScheme::Qpsk);
    CHECK(std::abs(Constellation::get(ModScheme::Qpsk).points[idx] -
                   cxd(1, 1) / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("nearest_point equals brute-force scan on random samples") {
    Rng rng(42);
    for (auto s : {ModScheme::Bpsk, ModScheme::Qpsk, ModScheme::Qam16, ModScheme::Qam64}) {
        const auto& c = Constellation::get(s);
        for (int t = 0; t < 10000; ++t) {
            cxd x(3.0 * (rng.uniform() - 0.5), 3.0 * (rng.uniform() - 0.5));
            int got = nearest_point(x, s);
            int want = 0;
            double best = std::norm(x - c.points[0]);
            for (int i = 1; i < int(c.points.size()); ++i) {
                double d = std::norm(x - c.points[i]);
                if (d < best) {
                    best = d;
                    want = i;
                }
            }
            CHECK(got == want);
        }
    }
}

TEST_CASE("fft64 DC conventions") {
    std::vector<cxd> spec(64, cxd(0, 0));
    spec[0] = cxd(64, 0);
    auto t = ifft64(spec);
    for (auto v : t) CHECK(std::abs(v - cxd(1, 0)) < 1e-12);

    std::vector<cxd> ones(64, cxd(1, 0));
    auto f = fft64(ones);
    CHECK(std::abs(f[0] - cxd(64, 0)) < 1e-12);
    for (int i = 1; i < 64; ++i) CHECK(std::abs(f[i]) < 1e-12);
}

TEST_CASE("fft round trip and Parseval against direct DFT oracle") {
    Rng rng(7);
    std::vector<cxd> x(64);
    for (auto& v : x) v = cxd(rng.gaussian(), rng.gaussian());

    auto fast = fft64(x);
    auto slow = dft_reference(x);
    CHECK(max_err(fast, slow) < 1e-10);

    auto rt = ifft64(fast);
    CHECK(max_err(rt, x) < 1e-10);

    double et = 0, ef = 0;
    for (auto v : x) et += std::norm(v);
    for (auto v : fast) ef += std::norm(v);
    CHECK(et == doctest::Approx(ef / 64.0).epsilon(1e-12));

    // non-power-of-two length through the same path
    std::vector<cxd> y(100);
    for (auto& v : y) v = cxd(rng.gaussian(), rng.gaussian());
    CHECK(max_err(dft(y), dft_reference(y)) < 1e-9);
    CHECK(max_err(idft(dft(y)), y) < 1e-10);
}

TEST_CASE("fft64 rejects wrong length") {
    std::vector<cxd> x(63);
    CHECK_THROWS(fft64(x));
    CHECK_THROWS(fft_ng(std::vector<cxd>(130), 2));
}

TEST_CASE("conv encoder basics") {
    // linear code: all-zero in, all-zero out
    auto z = conv_encode(std::vector<uint8_t>(40, 0));
    for (auto b : z) CHECK(b == 0);

    // first coded pair for input 1 from the zero state is (1,1)
    auto one = conv_encode({1});
    REQUIRE(one.size() == 2);
    CHECK(one[0] == 1);
    CHECK(one[1] == 1);

    CHECK(conv_encode(std::vector<uint8_t>(17, 1)).size() == 34);
    CHECK_THROWS(viterbi_decode({1, 0, 1}));
}

TEST_CASE("viterbi corrects a single flipped bit in a 24-bit message") {
    // the code is unterminated (coded length is exactly 2n), so guaranteed
    // correction holds for flips ahead of the final constraint length;
    // a tail flip can tie two end states
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        std::vector<uint8_t> msg(24);
        for (auto& b : msg) b = rng.next_u64() & 1;
        auto coded = conv_encode(msg);
        std::size_t flip = rng.next_u64() % (2 * (msg.size() - 7));
        coded[flip] ^= 1;
        CHECK(viterbi_decode(coded) == msg);
    }
}

TEST_CASE("viterbi is exhaustive-ML on 8-bit messages") {
    // oracle: enumerate all 2^8 codewords, pick min Hamming distance
    Rng rng(1234);
    for (int t = 0; t < 200; ++t) {
        std::vector<uint8_t> msg(8);
        for (auto& b : msg) b = rng.next_u64() & 1;
        auto coded = conv_encode(msg);
        for (int f = 0; f < 3; ++f) coded[rng.next_u64() % coded.size()] ^= 1;

        int best_dist = 1 << 20;
        for (int m = 0; m < 256; ++m) {
            std::vector<uint8_t> cand(8);
            for (int b = 0; b < 8; ++b) cand[b] = (m >> b) & 1;
            auto cc = conv_encode(cand);
            int d = 0;
            for (std::size_t i = 0; i < cc.size(); ++i) d += cc[i] != coded[i];
            best_dist = std::min(best_dist, d);
        }

        auto dec = viterbi_decode(coded);
        auto re = conv_encode(dec);
        int d = 0;
        for (std::size_t i = 0; i < re.size(); ++i) d += re[i] != coded[i];
        CHECK(d == best_dist);  // decoder reaches the ML distance
    }
}

TEST_CASE("viterbi(encode(m)) == m exhaustively up to 16 bits") {
    for (int len : {1, 2, 3, 5, 8, 12, 16}) {
        const long total = 1L << len;
        for (long m = 0; m < total; ++m) {
            std::vector<uint8_t> msg(len);
            for (int b = 0; b < len; ++b) msg[b] = (m >> b) & 1;
            if (viterbi_decode(conv_encode(msg)) != msg) {
                CHECK(viterbi_decode(conv_encode(msg)) == msg);
                return;
            }
        }
    }
    CHECK(true);
}

TEST_CASE("crc32 known values") {
    CHECK(crc32({}) == 0x00000000u);
    std::vector<uint8_t> digits = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    CHECK(crc32(digits) == 0xCBF43926u);
}

TEST_CASE("crc32 against bitwise reference and single-bit sensitivity") {
    // bitwise (reflected) reference implementation
    auto reference = [](const std::vector<uint8_t>& bytes) {
        uint32_t crc = 0xFFFFFFFFu;
        for (uint8_t b : bytes) {
            crc ^= b;
            for (int i = 0; i < 8; ++i)
                crc = (crc & 1) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
        }
        return crc ^ 0xFFFFFFFFu;
    };
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        std::vector<uint8_t> data(1 + rng.next_u64() % 64);
        for (auto& b : data) b = rng.next_u64() & 0xFF;
        CHECK(crc32(data) == reference(data));

        auto flipped = data;
        flipped[rng.next_u64() % flipped.size()] ^= uint8_t(1 << (rng.next_u64() % 8));
        CHECK(crc32(flipped) != crc32(data));
    }
}
