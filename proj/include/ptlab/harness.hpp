#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ptlab/limit.hpp"
#include "ptlab/noise.hpp"
#include "ptlab/spde.hpp"

namespace ptlab {

// Test functions with ||grad phi||_inf recorded; the sup norm enters every
// martingale bound, so it is computed once here rather than ad hoc.
struct ObservableSet {
    std::vector<Observable> phi;
    std::vector<double> grad_inf;

    std::size_t size() const { return phi.size(); }
};

// Resolves names against default_observables(n); throws on an unknown name.
ObservableSet make_observable_set(const std::vector<std::string>& names, int n);

struct ExperimentPlan {
    std::vector<double> ladder;  // strictly decreasing ell values
    int ensemble_size = 8;
    SolverConfig cfg;   // template; per-trajectory seeds are derived
    NoiseSpec noise;    // template; ell is replaced per rung
    std::vector<std::string> observables = {"cos10", "sin10", "cos01", "sin01",
                                            "cos11", "sin11", "bump"};
    std::uint64_t seed_root = 1;
};

void validate(const ExperimentPlan& plan);

void to_json(nlohmann::json& j, const ExperimentPlan& plan);
void from_json(const nlohmann::json& j, ExperimentPlan& plan);

// Pure function of (root, rung, trajectory); no two trajectories share a
// stream.
std::uint64_t trajectory_seed(std::uint64_t seed_root, std::size_t ell_index,
                              std::size_t traj_index);

struct EnsembleStats {
    double ell = 0.0;
    int n_ok = 0, n_failed = 0;
    std::vector<std::string> failures;  // one message per aborted trajectory

    std::vector<double> time;
    // per-record ensemble means of the energy diagnostics
    std::vector<double> v3_l2sq_mean, omega3_l2sq_mean;
    std::vector<double> grad_v3_l2sq_mean, grad_omega3_l2sq_mean;
    std::vector<double> v3_noise_input_mean;
    // [observable][record] means and unbiased variances of the projections
    std::vector<std::vector<double>> omega3_mean, omega3_var, v3_mean, v3_var;
    // running means of the per-trajectory quadratic variations
    std::vector<std::vector<double>> qv_v3_mean, qv_omega3_transport_mean,
        qv_omega3_stretch_mean;
    // standard errors of the final quadratic variations, per observable
    std::vector<double> qv_v3_se, qv_omega3_transport_se, qv_omega3_stretch_se;
    // ensemble-mean coefficient fields (with cfg.keep_fields)
    std::vector<ScalarField> omega3_mean_field, v3_mean_field;
    // per-trajectory closed-books energy residual at the horizon,
    // normalized by ||v3(0)||^2
    std::vector<double> energy_residual;
    double v3_0_l2sq = 0.0, omega3_0_l2sq = 0.0;
    bool any_fourth_moment_exceeded = false;

    CovarianceTables tables;  // the calibrated covariance this rung ran with
};

// Runs plan.ensemble_size trajectories from default_initial_state with
// derived seeds, concurrently on `threads` workers; the reduction is a
// fixed-order sum over trajectory indices regardless of completion order.
// Throws if more than 1% of trajectories abort.
EnsembleStats ensemble_run(const ExperimentPlan& plan, std::size_t ell_index,
                           int threads);

struct MartingaleCheck {
    std::string observable;
    // families: 0 transport on v3, 1 transport on omega3, 2 stretching
    double estimate[3] = {0, 0, 0};
    double se[3] = {0, 0, 0};
    double bound[3] = {0, 0, 0};
    bool pass = true;
};

// E[M(T)^2] estimates against their a priori bounds (3 sigma MC slack):
//   transport on v3:     |Q_H| ||grad phi||_inf^2 T ||v3(0)||^2
//   transport on omega3: |Q_H| ||grad phi||_inf^2 int E||omega3||^2 dt
//   stretching:          |Q_3| ||grad phi||_inf^2 ||v3(0)||^2 / (2 nu)
// with the omega3 integral measured along the ensemble.
std::vector<MartingaleCheck> martingale_checks(const EnsembleStats& es,
                                               const ObservableSet& obs, double nu,
                                               double t_end);

struct WeakErrorRow {
    std::string observable;
    double t = 0.0;
    double err_omega3 = 0.0, se_omega3 = 0.0;
    double err_v3 = 0.0, se_v3 = 0.0;
};

struct WeakErrorTable {
    double ell = 0.0;
    std::vector<WeakErrorRow> rows;  // observable-major, then record time
    // sqrt(int_0^T ||mean - limit||^2 dt) over both fields; needs mean and
    // limit coefficient fields on the same record grid
    double aggregate_l2 = -1.0;
};

// Compares the ensemble means against a limit-model run on the identical
// time grid; limit_stats must carry fields if the aggregate is wanted.
WeakErrorTable weak_error(const EnsembleStats& es, const TrajectoryStats& limit_stats,
                          const ObservableSet& obs);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t config_digest = 0;
    std::vector<std::uint64_t> seeds;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    nlohmann::json parameters;

    nlohmann::json to_json_object() const;  // includes artifact/toolchain versions
};

nlohmann::json versions_json();

}  // namespace ptlab
