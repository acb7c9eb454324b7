#pragma once

#include "ptlab/fft.hpp"
#include "ptlab/grid.hpp"

namespace ptlab {

// Fourier calculus on the periodic square.  All operations are pure
// functions of their inputs; symbols follow the e_k(x) = exp(2*pi*i k.x)
// convention, so d/dx_j has symbol 2*pi*i*k_j and the Laplacian
// -4*pi^2*|k|^2.

RealField to_real(const ScalarField& f);
ScalarField from_real(const RealField& r);

double field_mean(const ScalarField& f);
void pin_zero_mean(ScalarField& f);

// l2 norms/inner products in the L^2(T^2) normalization (unit torus area),
// computed from coefficients; exact by the discrete Parseval identity.
double l2_norm_sq(const ScalarField& f);
double l2_inner(const ScalarField& f, const ScalarField& g);
double linf_norm(const RealField& r);

// grad f = (d1 f, d2 f); with rotated set, (d2 f, -d1 f).
VectorField2 apply_gradient(const ScalarField& f, bool rotated = false);
ScalarField derivative(const ScalarField& f, int axis);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField2& u);

// G*f with G the zero-mean Green function of -Laplace on the torus:
// f_hat(k)/(4 pi^2 |k|^2) for k != 0.  Rejects inputs with nonzero mean.
ScalarField green_convolve(const ScalarField& f);

// v_H with div v_H = 0 and d2 v1 - d1 v2 = omega3.
VectorField2 biot_savart(const ScalarField& omega3);

// 2/3-rule: zero all coefficients with max(|k1|,|k2|) > n/3.
void dealias(ScalarField& f);
ScalarField dealiased(const ScalarField& f);

// Pointwise product computed in real space, transformed back and dealiased.
ScalarField multiply_dealias(const ScalarField& f, const ScalarField& g);

// Samples an analytic function h(x1, x2) on the grid.
template <typename F>
RealField sample_function(int n, F&& h) {
    RealField r(n);
    FourierGrid g(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const double x1 = g.coord(i1);
        for (int i2 = 0; i2 < n; ++i2) r.at(i1, i2) = h(x1, g.coord(i2));
    }
    return r;
}

}  // namespace ptlab
