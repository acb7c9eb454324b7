#pragma once

#include <vector>

#include "ptlab/grid.hpp"
#include "ptlab/profile.hpp"
#include "ptlab/rng.hpp"

namespace ptlab {

// Vertical intensity rule: either gamma = q0 * Gamma (nonzero limit ratio)
// or gamma = Gamma^(1+p), which is o(Gamma) since Gamma -> 0.
struct GammaRule {
    enum class Kind { proportional, subordinate };
    Kind kind = Kind::proportional;
    double q0 = 1.0;
    double p = 0.5;
};

struct NoiseSpec {
    double ell = 1.0;
    double kappa = 0.25;
    GammaRule rule;
    double r_theta = 0.35;
    double r_chi = 0.35;
};

// Fourier-diagonal realization of the vortex noise on the n-grid:
// sigma_H = Gamma K*theta_ell, sigma_3 = gamma3 G*chi_ell, held as the
// per-mode complex amplitudes (sigma_hat_H(k), sigma_hat_3(k)).
struct SpectralNoise {
    int n = 0;
    double ell = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;   // Gamma_ell, horizontal intensity
    double gamma3 = 0.0;  // gamma_ell, vertical intensity
    VectorField2 sigma_h_hat;
    ScalarField sigma3_hat;
};

struct CovarianceTables {
    int n = 0;
    // grid tables of the full 3x3 block Q(a), row-major in (component, component)
    RealField q[3][3];
    Mat2 q_h0;         // Q_H(0)
    Mat2 grad_qh3_0;   // [i][j] = d_j Q_{i,3}(0)
    Mat2 hess_q3_0;    // [i][j] = d_i d_j Q_3(0)
    double opnorm_qh = 0.0;  // max over k of |sigma_hat_H(k)|^2
    double opnorm_q3 = 0.0;  // max over k of |sigma_hat_3(k)|^2
};

// Gamma_ell = 2 sqrt(kappa) / ||K*theta_ell||_{L2} on the grid, so that
// ||sigma_H||^2_{L2} = Tr Q_H(0) = 4 kappa exactly.  Requires the core to
// be resolved: n*ell >= 8.
double calibrate_gamma(const RadialBump& theta, double ell, double kappa, int n);

SpectralNoise build_spectral_noise(const NoiseSpec& spec, int n);

CovarianceTables covariance_tables(const SpectralNoise& sn);

// Worst-case defects of the algebraic identities the tables must satisfy:
// the trace pin Tr Q_H(0) = 4 kappa, evenness of the diagonal blocks,
// oddness of the horizontal/vertical cross block, Q(-a) = Q(a)^T, and the
// per-mode factorization q_hat_ab(k) = sigma_hat_a(k) conj(sigma_hat_b(k)).
struct StructureChecks {
    double trace_error = 0.0;
    double worst_even = 0.0;
    double worst_odd = 0.0;
    double worst_transpose = 0.0;
    double worst_factorization = 0.0;
};

StructureChecks structure_checks(const SpectralNoise& sn, const CovarianceTables& ct);

// One Q-Wiener increment over dt: independent complex Gaussians on a
// Hermitian half lattice, mirrored by conjugation.  Outputs are coefficient
// fields of real-valued increments with E[dW(x) dW(y)^T] = Q(x-y) dt.
void sample_increment(const SpectralNoise& sn, double dt, GaussianStream& gs,
                      VectorField2& dw_h, ScalarField& dw_3);

// L1 norm of the Biot-Savart kernel over the torus, by polar quadrature of
// the Ewald evaluation; enters the operator-norm cross bound
// opnorm_qh <= Gamma^2 ||K||_L1^2 ||theta||_L1^2.
double biot_savart_kernel_l1();

struct HypothesisRow {
    double ell = 0.0;
    int n = 0;
    double gamma = 0.0, gamma3 = 0.0;
    Mat2 q_h0, grad_qh3_0;
    double opnorm_qh = 0.0, opnorm_q3 = 0.0, hess_q3_norm = 0.0;
};

// Per-ladder covariance summary feeding the scaling-limit hypothesis
// checks: (a) Q_H(0) limit, (b) opnorm decay, (c) limit of grad Q_{H,3}(0),
// (d) bounded Hessian.  Grid per rung: smallest power of two with
// n*ell >= 8, at least n_min.
std::vector<HypothesisRow> hypothesis_ladder(const NoiseSpec& base,
                                             const std::vector<double>& ells, int n_min);

}  // namespace ptlab
