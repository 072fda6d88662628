#pragma once

#include <cstdint>
#include <vector>

namespace oolink {

// Rate-1/2 convolutional code, constraint length 7, generators 133/171
// octal (the standard 802.11 code). The encoder starts in the all-zero
// state and is not flushed, so the coded length is exactly twice the
// input length; the decoder searches over all end states.

std::vector<uint8_t> conv_encode(const std::vector<uint8_t>& bits);

/// Hard-decision maximum-likelihood decode over the full trellis.
/// Throws on odd input length.
std::vector<uint8_t> viterbi_decode(const std::vector<uint8_t>& coded);

}  // namespace oolink
