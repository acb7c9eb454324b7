#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ptlab/grid.hpp"
#include "ptlab/noise.hpp"

namespace ptlab {

// Vertical vorticity and vertical velocity; the horizontal companions
// v_H = biot_savart(omega3) and omega_H = rotated gradient of v3 are
// derived on demand.  Both fields are zero-mean and dealiased.
struct State {
    ScalarField omega3;
    ScalarField v3;
    double t = 0.0;

    State() = default;
    explicit State(int n) : omega3(n), v3(n) {}
};

struct SolverConfig {
    double nu = 0.05;
    double dt = 1e-3;
    double t_end = 1.0;
    int n = 64;
    std::uint64_t seed = 1;
    int record_every = 1;
    // soft ceiling on ||omega3||^4 relative to the initial sizes; 0 disables
    double fourth_moment_cap = 0.0;
    // also keep the coefficient fields at record times (memory-heavy)
    bool keep_fields = false;
};

struct Observable {
    std::string name;
    ScalarField phi_hat;
};

// A handful of low Fourier modes plus a smooth bump.
std::vector<Observable> default_observables(int n);

struct TrajectoryStats {
    std::vector<double> time;
    std::vector<double> v3_l2sq, omega3_l2sq;
    std::vector<double> grad_v3_l2sq, grad_omega3_l2sq;
    std::vector<double> omega3_l4;
    // cumulative noise energy actually injected into v3 (martingale part
    // plus its Ito square), so energy books can be closed pathwise
    std::vector<double> v3_noise_input;
    std::vector<std::string> observable_names;
    // [observable][record index]
    std::vector<std::vector<double>> omega3_obs, v3_obs;
    // running quadratic variation of the projected martingale pieces,
    // same indexing as the observable tables
    std::vector<std::vector<double>> qv_v3, qv_omega3_transport, qv_omega3_stretch;
    // populated only with keep_fields
    std::vector<ScalarField> omega3_fields, v3_fields;
    bool fourth_moment_exceeded = false;
};

// omega3 = sin(2 pi x1) cos(2 pi x2), v3 = cos(2 pi x2)
State default_initial_state(int n);

// Non-martingale right sides of the Ito system:
//   omega3: -dealias(v_H . grad omega3) + nu Lap omega3
//           + (1/2) div[Q_H(0) grad omega3] + div[grad Q_{H,3}(0) omega_H]
//   v3:     -dealias(v_H . grad v3) + nu Lap v3 + (1/2) div[Q_H(0) grad v3]
void ito_drift(const State& s, const CovarianceTables& ct, double nu,
               ScalarField& d_omega3, ScalarField& d_v3);

// Decay rates lambda(k) = 4 pi^2 nu |k|^2 + 2 pi^2 k.Q_H(0) k of the
// constant-coefficient part, indexed like the coefficient storage; the
// integrating factor is exp(-lambda dt).
std::vector<double> if_symbol(const CovarianceTables& ct, double nu, int n);

// Fourier symbol of v3 -> div[M grad^perp v3], the linear source feeding
// the omega3 equation through the matrix M (cross-gradient table or its
// scaling limit).
double tilt_symbol(const Mat2& m, double k1, double k2);

// Martingale increments, state frozen at step start:
//   omega3: -(dW_H . grad omega3 - omega_H . grad dW_3)
//   v3:     -dW_H . grad v3
// each dealiased.
void noise_term(const State& s, const VectorField2& dw_h, const ScalarField& dw_3,
                ScalarField& n_omega3, ScalarField& n_v3);

// dt ceiling 0.2 min(1/(||v_H||_inf 2 pi n/3), 1/(2 pi^2 |Q_H| (n/3)^2))
// from the advective band speed and the noise quasi-diffusion.
double stability_limit(const State& s, const CovarianceTables& ct);

// Per-step bookkeeping filled by step_with_increment on request.
// v3_noise_energy is the energy the sampled increment actually put into
// v3 over the step, 2<Dv', DN> + |DN|^2 with D the integrating factor
// and v' the post-drift coefficients; summing it along a trajectory
// closes the discrete energy balance to the time-stepping bias alone.
// The qv_* entries are squared projections of the three martingale
// pieces onto each kernel; their running sums estimate the quadratic
// variations of the observable martingales.
struct StepAudit {
    StepAudit() = default;
    StepAudit(const std::vector<Observable>& obs, int n);

    std::vector<RealField> kernels;
    double v3_noise_energy = 0.0;
    std::vector<double> qv_v3, qv_omega3_transport, qv_omega3_stretch;
};

// One integrating-factor Euler-Maruyama step with the given increment;
// throws on NaN or magnitude blow-up.
State step_with_increment(const State& s, const SolverConfig& cfg,
                          const CovarianceTables& ct, const VectorField2& dw_h,
                          const ScalarField& dw_3, StepAudit* audit = nullptr);

// Samples the increment from the stream, then steps.
State step(const State& s, const SolverConfig& cfg, const SpectralNoise& sn,
           const CovarianceTables& ct, GaussianStream& gs, StepAudit* audit = nullptr);

std::pair<State, TrajectoryStats> run_trajectory(const State& init, const SolverConfig& cfg,
                                                 const SpectralNoise& sn,
                                                 const CovarianceTables& ct,
                                                 const std::vector<Observable>& obs);

}  // namespace ptlab
