#include "ptlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace ptlab {

namespace {
std::mutex g_planner_mutex;
}

Fft::Fft(int n) : n_(n) {
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("Fft: n must be even and positive");
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(n) * n);
    if (!scratch) throw std::bad_alloc();
    // FFTW_UNALIGNED: plans must accept arbitrary heap arrays via the
    // new-array interface.  FFTW_ESTIMATE: deterministic plan choice.
    plan_fwd_ = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("Fft: plan creation failed");
}

void Fft::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / (double(n_) * n_);
    const std::size_t m = std::size_t(n_) * n_;
    for (std::size_t i = 0; i < m; ++i) out[i] *= scale;
}

void Fft::backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

const Fft& fft_for(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<Fft>(n)).first;
    return *it->second;
}

}  // namespace ptlab
