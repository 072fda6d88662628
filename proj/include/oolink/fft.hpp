#pragma once

#include <vector>

#include "oolink/types.hpp"

namespace oolink {

// Transform convention used throughout: the forward DFT is unscaled,
//   X[l] = sum_n x[n] e^{-j 2 pi n l / N},
// and the inverse carries the 1/N factor, so ifft(fft(x)) == x and
// sum |x|^2 == (1/N) sum |X|^2.

/// Forward DFT, any length, unscaled.
std::vector<cxd> dft(const std::vector<cxd>& in);

/// Inverse DFT, any length, scaled by 1/N.
std::vector<cxd> idft(const std::vector<cxd>& in);

/// 64-point transforms for one OFDM symbol. Throws on wrong length.
std::vector<cxd> fft64(const std::vector<cxd>& block);
std::vector<cxd> ifft64(const std::vector<cxd>& block);

/// Oversampled variant: length must be 64*G.
std::vector<cxd> fft_ng(const std::vector<cxd>& block, int g);
std::vector<cxd> ifft_ng(const std::vector<cxd>& block, int g);

}  // namespace oolink
