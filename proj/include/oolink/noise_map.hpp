#pragma once

#include <array>
#include <vector>

#include "oolink/frame_config.hpp"
#include "oolink/types.hpp"

namespace oolink {

enum class NoiseMapMode { RawDeviation, EqualizedResidual };

/// Per-subcarrier kernel density estimate of the deviation of received
/// training values from the known transmitted ones. The map folds channel
/// response and noise into one distribution; the decoder scores
/// constellation candidates by looking their deviation up in it.
///
/// The deviation is the complex difference between observation and
/// reference: Y - X_tx in RawDeviation mode (channel folded in), or
/// Y / H_hat - X_unit in EqualizedResidual mode (least-squares equalized
/// first). Samples are stored as (amplitude, phase) pairs of that
/// difference, with per-coordinate Silverman bandwidths
/// (1.06 sigma n^{-1/5}, floored at 1e-3) and phases wrapped to (-pi, pi].
///
/// Two views of the same kernel set:
///  - density(a, phi): the product-kernel density on the (amplitude, phase)
///    chart, amplitude kernel reflected at zero and phase kernel wrapped so
///    the density integrates to 1 over a in [0, inf), phi on the circle.
///  - likelihood(): the Gaussian mixture in the complex plane, kernels
///    centered at a_m e^{j phi_m} with the radial bandwidth. The polar chart
///    is singular where deviations cluster at the origin (flat equalized
///    channels); the Cartesian form of the mixture is regular there and is
///    what the joint-ML decision uses.
class NoiseMap {
  public:
    struct Kde {
        std::vector<double> amp;    // kernel centers
        std::vector<double> phase;
        double h_amp = 1e-3;
        double h_phase = 1e-3;
        /// Radial bandwidth of the complex-plane mixture: Silverman width
        /// widened by the cluster's per-component scatter, so a handful of
        /// training samples does not get memorized as the density.
        double h_mix = 1e-3;
    };

    NoiseMapMode mode = NoiseMapMode::EqualizedResidual;

    /// LS channel gain per FFT bin estimated from the LTF copies (includes
    /// the transmit bin scaling, so observation / channel(bin) lands in
    /// unit constellation space), smoothed across neighboring tones.
    std::array<cxd, 64> channel{};

    /// Known transmitted LTF bin value (scaled) per FFT bin, for RawDeviation.
    std::array<cxd, 64> tx_reference{};

    double tx_scale = 1.0;

    /// KDE per data subcarrier, in config.data_subcarriers order.
    std::vector<Kde> kdes;

    /// Complex deviation of an observed bin value from a candidate unit
    /// constellation point, per the configured mode.
    cxd deviation(int bin, cxd observed, cxd candidate) const;

    /// Product-kernel density on the (amplitude, phase) chart.
    double density(int data_idx, double a, double phi) const;

    /// Gaussian-mixture density of a complex deviation (kernels at
    /// a_m e^{j phi_m}, radial bandwidth).
    double mixture_density(int data_idx, cxd dev) const;

    /// A symmetric map: one kernel at the origin, i.e. a circular-Gaussian
    /// density in the complex deviation. Under this map joint-ML decisions
    /// reduce exactly to nearest-point decisions.
    static NoiseMap isotropic(double sigma, const FrameConfig& config);

    static double silverman_bandwidth(const std::vector<double>& samples);
};

struct SymbolCopies;  // decoder.hpp

/// Build the KDE map from the two LTF symbols' copies. Requires 2*G samples
/// per subcarrier. Phase deviations are wrapped to (-pi, pi].
NoiseMap build_noise_map(const SymbolCopies& ltf_block0, const SymbolCopies& ltf_block1,
                         const FrameConfig& config, NoiseMapMode mode);

/// Likelihood of one observed copy value under a candidate lattice point:
/// the map density evaluated at the deviation, floored at 1e-300 so
/// log-accumulation stays finite.
double likelihood(const NoiseMap& map, int data_idx, cxd observed, cxd candidate,
                  const FrameConfig& config);

}  // namespace oolink
