#pragma once

#include <array>
#include <vector>

#include "oolink/constellation.hpp"
#include "oolink/types.hpp"

namespace oolink {

/// OFDM numerology and subcarrier layout. Defaults model a 2 MHz
/// 802.11ah-style channel: 64 subcarriers, 16-sample cyclic prefix,
/// 40 us symbols, 52 data tones plus 4 pilot tones on +-{7,21}.
///
/// The short/long training sequences are stored here as configuration data
/// so alternate sequences can be swapped in. The defaults are the legacy
/// 802.11 L-STF / L-LTF values; the long sequence is extended with +1
/// entries on the four band-edge tones (+-27, +-28) so every occupied tone
/// is trained.
struct FrameConfig {
    int nfft = 64;
    int cp_len = 16;                    // base-rate samples
    double symbol_duration_s = 40e-6;   // (nfft + cp_len) / base_rate
    double base_rate_hz = 2e6;

    std::vector<int> data_subcarriers;   // signed indices, ascending
    std::vector<int> pilot_subcarriers;  // {-21, -7, 7, 21}
    std::vector<double> pilot_values;    // fixed +1 BPSK on every symbol

    /// Nonzero frequency-domain training values by signed subcarrier index.
    std::vector<std::pair<int, cxd>> stf_sequence;
    std::vector<std::pair<int, cxd>> ltf_sequence;

    static FrameConfig ieee80211ah_2mhz();

    double subcarrier_spacing_hz() const { return base_rate_hz / nfft; }
    int symbol_len() const { return nfft + cp_len; }  // 80 base samples

    /// FFT bin for a signed subcarrier index in [-nfft/2, nfft/2).
    int bin(int k) const { return (k % nfft + nfft) % nfft; }

    /// Signed subcarrier index for an FFT bin.
    int signed_index(int b) const { return b < nfft / 2 ? b : b - nfft; }

    /// Scale applied to frequency-domain values so time symbols have unit
    /// mean power: 64/sqrt(sum |X_l|^2) for a fully loaded symbol.
    double tx_bin_scale() const;
    double stf_bin_scale() const;
};

}  // namespace oolink
