#pragma once

#include <utility>

#include "ptlab/spde.hpp"

namespace ptlab {

// Deterministic scaling limit: eddy diffusion by Qbar plus the first-order
// AKA coupling of v3 into omega3 through the matrix A.
struct LimitParams {
    double nu = 0.05;
    Mat2 qbar;
    Mat2 a;
};

// Inherit Qbar = Q_H(0) and A = grad Q_{H,3}(0) from a finite-ell noise.
LimitParams limit_params_from(const CovarianceTables& ct, double nu);

struct UniquenessVerdict {
    bool pass = false;
    double min_eigenvalue = 0.0;
    double min_sampled = 0.0;
};

// The quadratic form x.Qbar x + y.Qbar y + 2 x.A y_perp as the 4x4
// symmetric block matrix [[Qbar, A R], [(A R)^T, Qbar]]; pass when the
// smallest eigenvalue is nonnegative (to rounding).  A positive sample
// count additionally probes the form on that many unit directions and
// reports the smallest value seen.
UniquenessVerdict uniqueness_condition(const LimitParams& p, int samples = 0);

// Right sides:
//   omega3: -dealias(v_H . grad omega3) + nu Lap omega3
//           + (1/2) div[Qbar grad omega3] + div[A grad^perp v3]
//   v3:     -dealias(v_H . grad v3) + nu Lap v3 + (1/2) div[Qbar grad v3]
void limit_rhs(const State& s, const LimitParams& p, ScalarField& d_omega3,
               ScalarField& d_v3);

// Advective dt ceiling; the linear part is integrated exactly.
double limit_stability(const State& s);

// One integrating-factor RK4 step.  The full linear part, including the
// triangular AKA coupling, sits in the exactly-evaluated exponential; only
// the advection runs through the Runge-Kutta stages.
State limit_step(const State& s, const LimitParams& p, double dt);

struct LimitConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int n = 64;
    int record_every = 1;
    bool keep_fields = false;
};

std::pair<State, TrajectoryStats> run_limit(const State& init, const LimitParams& p,
                                            const LimitConfig& cfg,
                                            const std::vector<Observable>& obs = {});

}  // namespace ptlab
