#include "oolink/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oolink {
namespace {

// Gray-coded amplitude per axis, index = the axis bits interpreted MSB first.
double gray_axis(int bits, int nbits) {
    switch (nbits) {
        case 1:
            return bits ? 1.0 : -1.0;
        case 2: {
            static const double lvl[4] = {-3.0, -1.0, 3.0, 1.0};  // 00 01 10 11
            return lvl[bits];
        }
        case 3: {
            static const double lvl[8] = {-7.0, -5.0, -1.0, -3.0, 7.0, 5.0, 1.0, 3.0};
            return lvl[bits];
        }
        default:
            throw std::logic_error("gray_axis: unsupported width");
    }
}

Constellation build(ModScheme scheme) {
    Constellation c;
    c.scheme = scheme;
    c.bits_per_symbol = bits_per_symbol(scheme);
    const int n = 1 << c.bits_per_symbol;
    c.points.resize(n);
    if (scheme == ModScheme::Bpsk) {
        c.points[0] = {-1.0, 0.0};
        c.points[1] = {1.0, 0.0};
        return c;
    }
    const int axis_bits = c.bits_per_symbol / 2;
    double scale = 1.0;
    if (scheme == ModScheme::Qpsk) scale = 1.0 / std::sqrt(2.0);
    if (scheme == ModScheme::Qam16) scale = 1.0 / std::sqrt(10.0);
    if (scheme == ModScheme::Qam64) scale = 1.0 / std::sqrt(42.0);
    for (int i = 0; i < n; ++i) {
        int ibits = i >> axis_bits;           // first half of the bits -> I
        int qbits = i & ((1 << axis_bits) - 1);
        c.points[i] = {gray_axis(ibits, axis_bits) * scale, gray_axis(qbits, axis_bits) * scale};
    }
    return c;
}

}  // namespace

const Constellation& Constellation::get(ModScheme scheme) {
    static const Constellation bpsk = build(ModScheme::Bpsk);
    static const Constellation qpsk = build(ModScheme::Qpsk);
    static const Constellation qam16 = build(ModScheme::Qam16);
    static const Constellation qam64 = build(ModScheme::Qam64);
    switch (scheme) {
        case ModScheme::Bpsk: return bpsk;
        case ModScheme::Qpsk: return qpsk;
        case ModScheme::Qam16: return qam16;
        case ModScheme::Qam64: return qam64;
    }
    throw std::logic_error("unknown scheme");
}

int bits_per_symbol(ModScheme scheme) {
    switch (scheme) {
        case ModScheme::Bpsk: return 1;
        case ModScheme::Qpsk: return 2;
        case ModScheme::Qam16: return 4;
        case ModScheme::Qam64: return 6;
    }
    throw std::logic_error("unknown scheme");
}

std::string scheme_name(ModScheme scheme) {
    switch (scheme) {
        case ModScheme::Bpsk: return "bpsk";
        case ModScheme::Qpsk: return "qpsk";
        case ModScheme::Qam16: return "qam16";
        case ModScheme::Qam64: return "qam64";
    }
    return "?";
}

std::string mcs_name(const Mcs& mcs) {
    return scheme_name(mcs.scheme) + (mcs.coding == Coding::HalfRate ? ":1/2" : "");
}

ModScheme parse_scheme(const std::string& name) {
    if (name == "bpsk") return ModScheme::Bpsk;
    if (name == "qpsk") return ModScheme::Qpsk;
    if (name == "qam16" || name == "16qam") return ModScheme::Qam16;
    if (name == "qam64" || name == "64qam") return ModScheme::Qam64;
    throw std::invalid_argument("unknown modulation scheme: " + name);
}

Mcs parse_mcs(const std::string& name) {
    Mcs m;
    auto colon = name.find(':');
    if (colon == std::string::npos) {
        m.scheme = parse_scheme(name);
        m.coding = Coding::None;
        return m;
    }
    m.scheme = parse_scheme(name.substr(0, colon));
    std::string rate = name.substr(colon + 1);
    if (rate != "1/2") throw std::invalid_argument("unknown coding rate: " + rate);
    m.coding = Coding::HalfRate;
    return m;
}

std::vector<cxd> modulate_bits(const std::vector<uint8_t>& bits, ModScheme scheme) {
    const Constellation& c = Constellation::get(scheme);
    if (bits.size() % static_cast<std::size_t>(c.bits_per_symbol) != 0)
        throw std::invalid_argument("modulate_bits: length not divisible by bits_per_symbol");
    std::vector<cxd> out;
    out.reserve(bits.size() / c.bits_per_symbol);
    for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
        int idx = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b) idx = (idx << 1) | (bits[i + b] & 1);
        out.push_back(c.points[idx]);
    }
    return out;
}

int nearest_point(cxd sample, ModScheme scheme) {
    const Constellation& c = Constellation::get(scheme);
    int best = 0;
    double best_d = std::norm(sample - c.points[0]);
    for (int i = 1; i < static_cast<int>(c.points.size()); ++i) {
        double d = std::norm(sample - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void point_bits(int index, ModScheme scheme, std::vector<uint8_t>& out) {
    const int n = bits_per_symbol(scheme);
    for (int b = n - 1; b >= 0; --b) out.push_back(static_cast<uint8_t>((index >> b) & 1));
}

}  // namespace oolink
