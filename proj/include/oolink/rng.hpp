#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "oolink/types.hpp"

namespace oolink {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a master seed and a path of indices
/// (axis point, trial number, stage, ...). Reproducible regardless of
/// execution order, so trials can run on any number of workers.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
    uint64_t s = splitmix64(master ^ 0x5bd1e995u);
    for (uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x9e3779b97f4a7c15ULL));
    return s;
}

/// Deterministic Gaussian/uniform source. Box-Muller on top of mt19937_64 so
/// the byte-for-byte output does not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double uniform() {  // (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circular complex Gaussian with E|z|^2 = total_var.
    cxd cgaussian(double total_var) {
        double s = std::sqrt(total_var / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

    uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace oolink
