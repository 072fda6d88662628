#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oolink/types.hpp"

namespace oolink {

enum class ModScheme { Bpsk, Qpsk, Qam16, Qam64 };
enum class Coding { None, HalfRate };

/// Modulation and coding selection for one frame.
struct Mcs {
    ModScheme scheme = ModScheme::Qpsk;
    Coding coding = Coding::None;
};

/// Unit-mean-power constellation with the per-axis Gray bit mapping used by
/// IEEE 802.11 (BPSK 0->-1, 1->+1; square QAM with Gray-coded axes, scaled
/// by 1/sqrt(2), 1/sqrt(10), 1/sqrt(42)).
///
/// Point index i encodes the bits_per_symbol input bits with the first bit
/// in the most significant position, so points[i] is both the lattice point
/// and the demapped bit pattern.
struct Constellation {
    ModScheme scheme;
    int bits_per_symbol;
    std::vector<cxd> points;

    static const Constellation& get(ModScheme scheme);
};

int bits_per_symbol(ModScheme scheme);
std::string scheme_name(ModScheme scheme);
std::string mcs_name(const Mcs& mcs);

/// Parse "bpsk", "qpsk", "qam16"/"16qam", "qam64"/"64qam"; throws on unknown.
ModScheme parse_scheme(const std::string& name);

/// Parse "<scheme>" or "<scheme>:1/2".
Mcs parse_mcs(const std::string& name);

/// Map a bit string (values 0/1) onto constellation points.
/// Throws if the length is not a multiple of bits_per_symbol.
std::vector<cxd> modulate_bits(const std::vector<uint8_t>& bits, ModScheme scheme);

/// Hard decision: index of the closest point, ties broken toward the lowest
/// index. The demapped bits are the index's binary digits, MSB first.
int nearest_point(cxd sample, ModScheme scheme);

/// Append the bits encoded by a point index (MSB first).
void point_bits(int index, ModScheme scheme, std::vector<uint8_t>& out);

}  // namespace oolink
