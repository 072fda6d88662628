#include "oolink/frame_config.hpp"

#include <algorithm>
#include <cmath>

namespace oolink {
namespace {

// Legacy L-LTF BPSK values for subcarriers -26..-1, 1..26.
const int kLtfNeg[26] = {1, 1,  -1, -1, 1, 1,  -1, 1, -1, 1, 1, 1, 1,
                         1, 1,  -1, -1, 1, 1,  -1, 1, -1, 1, 1, 1, 1};
const int kLtfPos[26] = {1, -1, -1, 1,  1, -1, 1,  -1, 1, -1, -1, -1, -1,
                         -1, 1, 1,  -1, -1, 1, -1, 1, -1, 1,  1,  1,  1};

// Legacy L-STF: 12 tones at multiples of 4, values +-(1+j)*sqrt(13/6).
struct StfTone {
    int k;
    int sign;  // applied to (1+j)
};
const StfTone kStf[12] = {{-24, 1}, {-20, -1}, {-16, 1}, {-12, -1}, {-8, -1}, {-4, 1},
                          {4, -1},  {8, -1},   {12, 1},  {16, 1},   {20, 1},  {24, 1}};

}  // namespace

FrameConfig FrameConfig::ieee80211ah_2mhz() {
    FrameConfig c;
    c.pilot_subcarriers = {-21, -7, 7, 21};
    c.pilot_values = {1.0, 1.0, 1.0, 1.0};
    for (int k = -28; k <= 28; ++k) {
        if (k == 0) continue;
        if (std::find(c.pilot_subcarriers.begin(), c.pilot_subcarriers.end(), k) !=
            c.pilot_subcarriers.end())
            continue;
        c.data_subcarriers.push_back(k);
    }

    const double a = std::sqrt(13.0 / 6.0);
    for (const auto& t : kStf) c.stf_sequence.push_back({t.k, cxd(a * t.sign, a * t.sign)});

    for (int i = 0; i < 26; ++i) c.ltf_sequence.push_back({-26 + i, cxd(kLtfNeg[i], 0.0)});
    for (int i = 0; i < 26; ++i) c.ltf_sequence.push_back({1 + i, cxd(kLtfPos[i], 0.0)});
    // band-edge extension so the 52 data tones are all trained
    for (int k : {-28, -27, 27, 28}) c.ltf_sequence.push_back({k, cxd(1.0, 0.0)});
    std::sort(c.ltf_sequence.begin(), c.ltf_sequence.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return c;
}

double FrameConfig::tx_bin_scale() const {
    double e = 0.0;
    for (const auto& [k, v] : ltf_sequence) {
        (void)k;
        e += std::norm(v);
    }
    return nfft / std::sqrt(e);
}

double FrameConfig::stf_bin_scale() const {
    double e = 0.0;
    for (const auto& [k, v] : stf_sequence) {
        (void)k;
        e += std::norm(v);
    }
    return nfft / std::sqrt(e);
}

}  // namespace oolink
