#include "oolink/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace oolink {
namespace {

// Cached FFTW plans per (size, direction). Plans are created with
// FFTW_ESTIMATE so the algorithm choice is deterministic, and with
// FFTW_UNALIGNED so the new-array execute below accepts std::vector
// storage. Plan creation is not thread-safe in FFTW; execution is.
class Planner {
  public:
    static Planner& instance() {
        static Planner p;
        return p;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cxd> dummy_in(n), dummy_out(n);
        fftw_plan p = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(dummy_in.data()),
            reinterpret_cast<fftw_complex*>(dummy_out.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

std::vector<cxd> run(const std::vector<cxd>& in, int sign) {
    if (in.empty()) throw std::invalid_argument("dft: empty input");
    const int n = static_cast<int>(in.size());
    fftw_plan plan = Planner::instance().get(n, sign);
    std::vector<cxd> tmp(in);
    std::vector<cxd> out(in.size());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

std::vector<cxd> dft(const std::vector<cxd>& in) { return run(in, FFTW_FORWARD); }

std::vector<cxd> idft(const std::vector<cxd>& in) {
    std::vector<cxd> out = run(in, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= inv;
    return out;
}

std::vector<cxd> fft64(const std::vector<cxd>& block) {
    if (block.size() != 64) throw std::invalid_argument("fft64: block must hold 64 samples");
    return dft(block);
}

std::vector<cxd> ifft64(const std::vector<cxd>& block) {
    if (block.size() != 64) throw std::invalid_argument("ifft64: block must hold 64 samples");
    return idft(block);
}

std::vector<cxd> fft_ng(const std::vector<cxd>& block, int g) {
    if (g < 1 || block.size() != static_cast<std::size_t>(64 * g))
        throw std::invalid_argument("fft_ng: block must hold 64*G samples");
    return dft(block);
}

std::vector<cxd> ifft_ng(const std::vector<cxd>& block, int g) {
    if (g < 1 || block.size() != static_cast<std::size_t>(64 * g))
        throw std::invalid_argument("ifft_ng: block must hold 64*G samples");
    return idft(block);
}

}  // namespace oolink
