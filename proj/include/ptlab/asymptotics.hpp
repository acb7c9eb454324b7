#pragma once

#include <vector>

#include "ptlab/grid.hpp"
#include "ptlab/profile.hpp"

namespace ptlab {

// <d_i G * phi_ell, d_j G * psi_ell> on the torus, with its log-normalized
// ratio.  Diagonal entries grow like (1/4pi) log(1/ell); off-diagonal
// entries vanish for radially symmetric profiles.
struct PairIntegralResult {
    int i = 1, j = 1;
    double ell = 1.0;
    double value = 0.0;
    double ratio = 0.0;  // value / log(1/ell); 0 at ell = 1
};

// Spectral evaluation: sum over k != 0 of
// (2 pi k_i)(2 pi k_j) phi_hat(ell k) conj(psi_hat(ell k)) / (4 pi^2 |k|^2)^2
// with profiles sampled on the n-grid.  Requires n*ell >= 8.
PairIntegralResult pair_integral(const RadialBump& phi, const RadialBump& psi,
                                 double ell, int i, int j, int n);

// A planar vortex density: displaced copies of one radial profile at scale
// ell, with weights summing to the total mass.
struct PlanarSite {
    double c1 = 0.0, c2 = 0.0;
    double w = 1.0;
};

// Planar convolution (grad G_{R^2} * psi)(x), by polar Gauss quadrature over
// each site's support.
Vec2 planar_grad_conv(const RadialBump& profile, const std::vector<PlanarSite>& sites,
                      double ell, double x1, double x2);

// Far-field deficit of the convolved field against the point-vortex field
// of the same total mass: per radius shell, the sup over sampled angles of
// |grad G * psi - m grad G| * |x|^2.  The scaled error stays bounded and its
// envelope does not grow with the shell radius.
struct FarfieldShell {
    double radius = 0.0;
    double sup_scaled_error = 0.0;
};

std::vector<FarfieldShell> farfield_error(const RadialBump& profile,
                                          const std::vector<PlanarSite>& sites,
                                          double ell, const std::vector<double>& radii,
                                          int n_angles = 24);

// Integral of (d_i G_{R^2})^2 over the square of side 1/ell minus the disk
// B_R, normalized by log(1/ell).  Radial part in closed form; the angular
// integral uses Gauss panels split at the pi/4 corners.  Requires ell < 1/R.
double annulus_integral(double R, double ell, int i);

// The same pair integral split through G = G_{R^2} + zeta on the periodic
// cell: planar x planar main term plus three zeta corrections, each
// evaluated by quadrature (no transforms), with seam strips near the cell
// boundary integrated against the wrapped kernels.
struct PairDecomposition {
    double main_term = 0.0;
    double cross_fz = 0.0;
    double cross_zf = 0.0;
    double zeta_zeta = 0.0;
    double total() const { return main_term + cross_fz + cross_zf + zeta_zeta; }
};

PairDecomposition pair_decomposition(const RadialBump& phi, const RadialBump& psi,
                                     double ell, int i, int j);

}  // namespace ptlab
