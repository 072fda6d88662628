#include "oolink/convcode.hpp"

#include <array>
#include <limits>
#include <stdexcept>

namespace oolink {
namespace {

constexpr int kG0 = 0133;  // 1 + D^2 + D^3 + D^5 + D^6
constexpr int kG1 = 0171;  // 1 + D + D^2 + D^3 + D^6
constexpr int kStates = 64;

inline uint8_t parity7(int v) {
    v ^= v >> 4;
    v ^= v >> 2;
    v ^= v >> 1;
    return static_cast<uint8_t>(v & 1);
}

// Branch outputs indexed by the 7-bit window (input bit in the MSB).
struct Tables {
    std::array<uint8_t, 128> out0{}, out1{};
    Tables() {
        for (int w = 0; w < 128; ++w) {
            out0[w] = parity7(w & kG0);
            out1[w] = parity7(w & kG1);
        }
    }
};
const Tables kTab;

}  // namespace

std::vector<uint8_t> conv_encode(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> out;
    out.reserve(bits.size() * 2);
    int state = 0;  // previous six bits, most recent in bit 5
    for (uint8_t b : bits) {
        int w = ((b & 1) << 6) | state;
        out.push_back(kTab.out0[w]);
        out.push_back(kTab.out1[w]);
        state = w >> 1;
    }
    return out;
}

std::vector<uint8_t> viterbi_decode(const std::vector<uint8_t>& coded) {
    if (coded.size() % 2 != 0)
        throw std::invalid_argument("viterbi_decode: coded length must be even");
    const std::size_t n = coded.size() / 2;
    std::vector<uint8_t> decoded(n);
    if (n == 0) return decoded;

    constexpr int kInf = std::numeric_limits<int>::max() / 2;
    std::array<int, kStates> metric;
    metric.fill(kInf);
    metric[0] = 0;  // encoder starts zeroed

    // prev-state trace; the input bit that led into state s is s>>5.
    std::vector<std::array<uint8_t, kStates>> trace(n);
    std::array<int, kStates> next;

    for (std::size_t t = 0; t < n; ++t) {
        const uint8_t r0 = coded[2 * t] & 1;
        const uint8_t r1 = coded[2 * t + 1] & 1;
        next.fill(kInf);
        for (int s = 0; s < kStates; ++s) {
            if (metric[s] >= kInf) continue;
            for (int b = 0; b < 2; ++b) {
                const int w = (b << 6) | s;
                const int ns = w >> 1;
                const int m = metric[s] + (kTab.out0[w] != r0) + (kTab.out1[w] != r1);
                if (m < next[ns]) {
                    next[ns] = m;
                    trace[t][ns] = static_cast<uint8_t>(s);
                }
            }
        }
        metric = next;
    }

    int best = 0;
    for (int s = 1; s < kStates; ++s)
        if (metric[s] < metric[best]) best = s;

    int state = best;
    for (std::size_t t = n; t-- > 0;) {
        decoded[t] = static_cast<uint8_t>((state >> 5) & 1);
        state = trace[t][state];
    }
    return decoded;
}

}  // namespace oolink
