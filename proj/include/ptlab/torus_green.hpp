#pragma once

#include "ptlab/grid.hpp"

namespace ptlab {

// E1(x) = int_x^inf exp(-t)/t dt for x > 0.
double exp_int_e1(double x);
// E1(x) + log(x), analytic at x = 0 with value -euler_gamma.
double e1_plus_log(double x);

// Green function of -Laplace on the unit torus with zero mean,
//   G(a) = sum_{k != 0} e_k(a) / (4 pi^2 |k|^2),
// evaluated pointwise by Ewald splitting.  The splitting parameter tau
// only redistributes work between the lattice sums; values are
// tau-independent to rounding.
class TorusGreen {
  public:
    explicit TorusGreen(double tau = 0.02);

    double periodic(double a1, double a2) const;
    Vec2 periodic_grad(double a1, double a2) const;

    // zeta(a) = G(a) + log|a| / (2 pi), the smooth remainder after the
    // free-space logarithm is removed.  Solves Delta zeta = 1 near a = 0.
    double regular(double a1, double a2) const;
    Vec2 regular_grad(double a1, double a2) const;

    // Biot-Savart kernel K = (d2 G, -d1 G).
    Vec2 kernel(double a1, double a2) const;

  private:
    double tau_;
    int kc_;      // spectral cutoff: modes with max(|k1|,|k2|) <= kc_
    int images_;  // real-space images with max(|m1|,|m2|) <= images_
};

}  // namespace ptlab
