#pragma once

#include "ptlab/grid.hpp"

namespace ptlab {

// Smooth radial bump with compact support and unit mass,
//   theta(x) = amplitude * exp(-1 / (1 - (|x|/radius)^2))   for |x| < radius.
// This is the shape used for both the vortex profile and the vertical
// component profile of the noise.
struct RadialBump {
    double radius = 0.0;
    double amplitude = 0.0;

    double operator()(double rho) const;
    double value(double x1, double x2) const;

    // 2 pi int_0^rho theta(s) s ds, the mass inside radius rho.
    double mass_within(double rho) const;

    // Continuum Fourier transform at |xi| = kmag (Hankel form):
    // 2 pi int_0^R theta(s) J0(2 pi kmag s) s ds.  Equals 1 at kmag = 0.
    double fourier(double kmag) const;
};

RadialBump make_bump(double radius);

// Mollified copy ell^{-2} theta(x/ell) sampled on the n-grid.  The scaled
// support ell*radius must fit strictly inside the half cell.
ScalarField sample_bump(const RadialBump& b, double ell, int n);

}  // namespace ptlab
