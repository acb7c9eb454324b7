#pragma once

#include "ptlab/grid.hpp"

namespace ptlab {

// Thin wrapper over FFTW complex 2D transforms with a process-wide plan
// cache.  Plans are created with FFTW_ESTIMATE so plan selection (and hence
// floating-point rounding) is reproducible run to run.  Execution through
// the new-array interface is thread-safe; plan creation is serialized
// internally.
//
// forward(): samples -> coefficients, applying the 1/n^2 normalization so
// that f_hat(k) approximates the integral of f e_{-k}.
// backward(): coefficients -> samples, no scaling.
class Fft {
public:
    explicit Fft(int n);

    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;

    int n() const { return n_; }

private:
    int n_;
    void* plan_fwd_;  // fftw_plan, kept opaque to avoid leaking fftw3.h
    void* plan_bwd_;
};

// Shared per-resolution instance (plans are immutable once built).
const Fft& fft_for(int n);

}  // namespace ptlab
