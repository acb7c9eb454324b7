#include "ptlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fftw3.h>

#include "ptlab/rng.hpp"
#include "ptlab/spectral_ops.hpp"

namespace ptlab {
namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        acc += 0.5 * (y[k] + y[k - 1]) * (t[k] - t[k - 1]);
    }
    return acc;
}

void add_scaled(ScalarField& acc, const ScalarField& f) {
    if (acc.n == 0) acc = ScalarField(f.n);
    for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += f.c[i];
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

double se_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

}  // namespace

ObservableSet make_observable_set(const std::vector<std::string>& names, int n) {
    const std::vector<Observable> all = default_observables(n);
    ObservableSet set;
    for (const std::string& name : names) {
        const auto it = std::find_if(all.begin(), all.end(),
                                     [&](const Observable& ob) { return ob.name == name; });
        if (it == all.end()) throw std::invalid_argument("unknown observable: " + name);
        set.phi.push_back(*it);
        const VectorField2 g = apply_gradient(it->phi_hat);
        const RealField g1 = to_real(g.u1), g2 = to_real(g.u2);
        double sup = 0.0;
        for (std::size_t i = 0; i < g1.v.size(); ++i) {
            sup = std::max(sup, std::hypot(g1.v[i], g2.v[i]));
        }
        set.grad_inf.push_back(sup);
    }
    return set;
}

void validate(const ExperimentPlan& plan) {
    for (std::size_t i = 1; i < plan.ladder.size(); ++i) {
        if (!(plan.ladder[i] < plan.ladder[i - 1])) {
            throw std::invalid_argument("plan ladder must be strictly decreasing");
        }
    }
    for (double ell : plan.ladder) {
        if (!(ell > 0.0 && ell < 1.0)) {
            throw std::invalid_argument("plan ladder entries must lie in (0, 1)");
        }
    }
    if (plan.ensemble_size < 2) {
        throw std::invalid_argument("ensemble_size must be at least 2");
    }
    if (plan.observables.empty()) {
        throw std::invalid_argument("plan needs at least one observable");
    }
}

void to_json(nlohmann::json& j, const ExperimentPlan& plan) {
    j = {{"ladder", plan.ladder},
         {"ensemble_size", plan.ensemble_size},
         {"cfg", nlohmann::json{{"nu", plan.cfg.nu},
                                {"dt", plan.cfg.dt},
                                {"t_end", plan.cfg.t_end},
                                {"n", plan.cfg.n},
                                {"record_every", plan.cfg.record_every},
                                {"fourth_moment_cap", plan.cfg.fourth_moment_cap}}},
         {"noise", nlohmann::json{{"kappa", plan.noise.kappa},
                                  {"rule",
                                   nlohmann::json{{"kind", plan.noise.rule.kind ==
                                                               GammaRule::Kind::proportional
                                                           ? "proportional"
                                                           : "subordinate"},
                                                  {"q0", plan.noise.rule.q0},
                                                  {"p", plan.noise.rule.p}}},
                                  {"r_theta", plan.noise.r_theta},
                                  {"r_chi", plan.noise.r_chi}}},
         {"observables", plan.observables},
         {"seed_root", plan.seed_root}};
}

void from_json(const nlohmann::json& j, ExperimentPlan& plan) {
    plan.ladder = j.at("ladder").get<std::vector<double>>();
    plan.ensemble_size = j.value("ensemble_size", 8);
    if (j.contains("cfg")) {
        const nlohmann::json& c = j.at("cfg");
        plan.cfg.nu = c.value("nu", 0.05);
        plan.cfg.dt = c.value("dt", 1e-3);
        plan.cfg.t_end = c.value("t_end", 1.0);
        plan.cfg.n = c.value("n", 64);
        plan.cfg.record_every = c.value("record_every", 1);
        plan.cfg.fourth_moment_cap = c.value("fourth_moment_cap", 0.0);
    }
    if (j.contains("noise")) {
        const nlohmann::json& s = j.at("noise");
        plan.noise.kappa = s.value("kappa", 0.25);
        if (s.contains("rule")) {
            const nlohmann::json& r = s.at("rule");
            const std::string kind = r.value("kind", "proportional");
            if (kind == "proportional") {
                plan.noise.rule.kind = GammaRule::Kind::proportional;
            } else if (kind == "subordinate") {
                plan.noise.rule.kind = GammaRule::Kind::subordinate;
            } else {
                throw std::invalid_argument("unknown gamma rule kind: " + kind);
            }
            plan.noise.rule.q0 = r.value("q0", 1.0);
            plan.noise.rule.p = r.value("p", 0.5);
        }
        plan.noise.r_theta = s.value("r_theta", 0.35);
        plan.noise.r_chi = s.value("r_chi", 0.35);
    }
    if (j.contains("observables")) {
        plan.observables = j.at("observables").get<std::vector<std::string>>();
    }
    plan.seed_root = j.value("seed_root", std::uint64_t{1});
}

std::uint64_t trajectory_seed(std::uint64_t seed_root, std::size_t ell_index,
                              std::size_t traj_index) {
    return derive_seed(seed_root, std::uint64_t(ell_index) + 1,
                       std::uint64_t(traj_index) + 1);
}

EnsembleStats ensemble_run(const ExperimentPlan& plan, std::size_t ell_index,
                           int threads) {
    validate(plan);
    if (ell_index >= plan.ladder.size()) {
        throw std::invalid_argument("ell_index beyond the plan ladder");
    }
    NoiseSpec spec = plan.noise;
    spec.ell = plan.ladder[ell_index];
    const SpectralNoise sn = build_spectral_noise(spec, plan.cfg.n);

    EnsembleStats es;
    es.ell = spec.ell;
    es.tables = covariance_tables(sn);
    const ObservableSet set = make_observable_set(plan.observables, plan.cfg.n);
    const State init = default_initial_state(plan.cfg.n);
    es.v3_0_l2sq = l2_norm_sq(init.v3);
    es.omega3_0_l2sq = l2_norm_sq(init.omega3);
    // the isotropic part of the calibrated Q_H(0); exact corrector sink rate
    const double kappa_eff = (es.tables.q_h0.a[0][0] + es.tables.q_h0.a[1][1]) / 4.0;

    const int m = plan.ensemble_size;
    std::vector<std::unique_ptr<TrajectoryStats>> slots(m);
    std::vector<std::string> errors(m);
    std::vector<bool> done(m, false);
    std::mutex mu;
    std::condition_variable cv;
    int next = 0;

    const auto work = [&]() {
        for (;;) {
            int i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= m) return;
                i = next++;
            }
            SolverConfig cfg = plan.cfg;
            cfg.seed = trajectory_seed(plan.seed_root, ell_index, std::size_t(i));
            std::unique_ptr<TrajectoryStats> st;
            std::string err;
            try {
                auto [fin, stats] = run_trajectory(init, cfg, sn, es.tables, set.phi);
                st = std::make_unique<TrajectoryStats>(std::move(stats));
            } catch (const std::exception& e) {
                err = "trajectory " + std::to_string(i) + " (seed " +
                      std::to_string(cfg.seed) + "): " + e.what();
            }
            {
                std::lock_guard<std::mutex> lock(mu);
                slots[i] = std::move(st);
                errors[i] = std::move(err);
                done[i] = true;
            }
            cv.notify_all();
        }
    };

    const int workers = std::max(1, std::min(threads, m));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    // fixed-order reduction: consume trajectory i only after i-1, whatever
    // the completion order, so the floating-point sums are reproducible
    const std::size_t nobs = set.size();
    std::vector<std::vector<double>> obs_w_sum, obs_w_sq, obs_v_sum, obs_v_sq;
    std::vector<std::vector<double>> qv_tv_sum, qv_tw_sum, qv_sw_sum;
    std::vector<std::vector<double>> qv_tv_fin(nobs), qv_tw_fin(nobs), qv_sw_fin(nobs);
    std::size_t nrec = 0;

    for (int i = 0; i < m; ++i) {
        std::unique_ptr<TrajectoryStats> st;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return done[i]; });
            st = std::move(slots[i]);
        }
        if (!st) {
            es.n_failed += 1;
            es.failures.push_back(errors[i]);
            continue;
        }
        if (es.n_ok == 0) {
            nrec = st->time.size();
            es.time = st->time;
            es.v3_l2sq_mean.assign(nrec, 0.0);
            es.omega3_l2sq_mean.assign(nrec, 0.0);
            es.grad_v3_l2sq_mean.assign(nrec, 0.0);
            es.grad_omega3_l2sq_mean.assign(nrec, 0.0);
            es.v3_noise_input_mean.assign(nrec, 0.0);
            const std::vector<double> zero(nrec, 0.0);
            obs_w_sum.assign(nobs, zero);
            obs_w_sq.assign(nobs, zero);
            obs_v_sum.assign(nobs, zero);
            obs_v_sq.assign(nobs, zero);
            qv_tv_sum.assign(nobs, zero);
            qv_tw_sum.assign(nobs, zero);
            qv_sw_sum.assign(nobs, zero);
            if (plan.cfg.keep_fields) {
                es.omega3_mean_field.assign(nrec, ScalarField());
                es.v3_mean_field.assign(nrec, ScalarField());
            }
        }
        es.n_ok += 1;
        for (std::size_t r = 0; r < nrec; ++r) {
            es.v3_l2sq_mean[r] += st->v3_l2sq[r];
            es.omega3_l2sq_mean[r] += st->omega3_l2sq[r];
            es.grad_v3_l2sq_mean[r] += st->grad_v3_l2sq[r];
            es.grad_omega3_l2sq_mean[r] += st->grad_omega3_l2sq[r];
            es.v3_noise_input_mean[r] += st->v3_noise_input[r];
        }
        for (std::size_t o = 0; o < nobs; ++o) {
            for (std::size_t r = 0; r < nrec; ++r) {
                const double w = st->omega3_obs[o][r], v = st->v3_obs[o][r];
                obs_w_sum[o][r] += w;
                obs_w_sq[o][r] += w * w;
                obs_v_sum[o][r] += v;
                obs_v_sq[o][r] += v * v;
                qv_tv_sum[o][r] += st->qv_v3[o][r];
                qv_tw_sum[o][r] += st->qv_omega3_transport[o][r];
                qv_sw_sum[o][r] += st->qv_omega3_stretch[o][r];
            }
            qv_tv_fin[o].push_back(st->qv_v3[o].back());
            qv_tw_fin[o].push_back(st->qv_omega3_transport[o].back());
            qv_sw_fin[o].push_back(st->qv_omega3_stretch[o].back());
        }
        if (plan.cfg.keep_fields) {
            for (std::size_t r = 0; r < nrec; ++r) {
                add_scaled(es.omega3_mean_field[r], st->omega3_fields[r]);
                add_scaled(es.v3_mean_field[r], st->v3_fields[r]);
            }
        }
        const double dissip = trapezoid(st->time, st->grad_v3_l2sq);
        es.energy_residual.push_back(
            (st->v3_l2sq.back() - st->v3_l2sq.front() +
             2.0 * (plan.cfg.nu + kappa_eff) * dissip - st->v3_noise_input.back()) /
            st->v3_l2sq.front());
        es.any_fourth_moment_exceeded |= st->fourth_moment_exceeded;
    }
    for (std::thread& t : pool) t.join();

    if (es.n_failed > 0 && double(es.n_failed) > 0.01 * double(m)) {
        std::string msg = "ensemble at ell = " + std::to_string(es.ell) + ": " +
                          std::to_string(es.n_failed) + "/" + std::to_string(m) +
                          " trajectories aborted";
        for (const std::string& f : es.failures) msg += "\n  " + f;
        throw std::runtime_error(msg);
    }
    if (es.n_ok == 0) throw std::runtime_error("ensemble produced no trajectories");

    const double inv = 1.0 / double(es.n_ok);
    for (std::size_t r = 0; r < nrec; ++r) {
        es.v3_l2sq_mean[r] *= inv;
        es.omega3_l2sq_mean[r] *= inv;
        es.grad_v3_l2sq_mean[r] *= inv;
        es.grad_omega3_l2sq_mean[r] *= inv;
        es.v3_noise_input_mean[r] *= inv;
    }
    es.omega3_mean.assign(nobs, {});
    es.omega3_var.assign(nobs, {});
    es.v3_mean.assign(nobs, {});
    es.v3_var.assign(nobs, {});
    es.qv_v3_mean.assign(nobs, {});
    es.qv_omega3_transport_mean.assign(nobs, {});
    es.qv_omega3_stretch_mean.assign(nobs, {});
    const double bessel =
        es.n_ok > 1 ? double(es.n_ok) / double(es.n_ok - 1) : 0.0;
    for (std::size_t o = 0; o < nobs; ++o) {
        for (std::size_t r = 0; r < nrec; ++r) {
            const double mw = obs_w_sum[o][r] * inv, mv = obs_v_sum[o][r] * inv;
            es.omega3_mean[o].push_back(mw);
            es.v3_mean[o].push_back(mv);
            es.omega3_var[o].push_back(
                std::max(0.0, (obs_w_sq[o][r] * inv - mw * mw) * bessel));
            es.v3_var[o].push_back(
                std::max(0.0, (obs_v_sq[o][r] * inv - mv * mv) * bessel));
            es.qv_v3_mean[o].push_back(qv_tv_sum[o][r] * inv);
            es.qv_omega3_transport_mean[o].push_back(qv_tw_sum[o][r] * inv);
            es.qv_omega3_stretch_mean[o].push_back(qv_sw_sum[o][r] * inv);
        }
        es.qv_v3_se.push_back(se_of(qv_tv_fin[o]));
        es.qv_omega3_transport_se.push_back(se_of(qv_tw_fin[o]));
        es.qv_omega3_stretch_se.push_back(se_of(qv_sw_fin[o]));
    }
    if (plan.cfg.keep_fields) {
        for (std::size_t r = 0; r < nrec; ++r) {
            for (cplx& c : es.omega3_mean_field[r].c) c *= inv;
            for (cplx& c : es.v3_mean_field[r].c) c *= inv;
        }
    }
    return es;
}

std::vector<MartingaleCheck> martingale_checks(const EnsembleStats& es,
                                               const ObservableSet& obs, double nu,
                                               double t_end) {
    if (obs.size() != es.qv_v3_se.size()) {
        throw std::invalid_argument("observable set does not match the ensemble");
    }
    const double omega_l2_int = trapezoid(es.time, es.omega3_l2sq_mean);
    std::vector<MartingaleCheck> out;
    for (std::size_t o = 0; o < obs.size(); ++o) {
        MartingaleCheck c;
        c.observable = obs.phi[o].name;
        const double gsq = obs.grad_inf[o] * obs.grad_inf[o];
        c.estimate[0] = es.qv_v3_mean[o].back();
        c.estimate[1] = es.qv_omega3_transport_mean[o].back();
        c.estimate[2] = es.qv_omega3_stretch_mean[o].back();
        c.se[0] = es.qv_v3_se[o];
        c.se[1] = es.qv_omega3_transport_se[o];
        c.se[2] = es.qv_omega3_stretch_se[o];
        c.bound[0] = es.tables.opnorm_qh * gsq * t_end * es.v3_0_l2sq;
        c.bound[1] = es.tables.opnorm_qh * gsq * omega_l2_int;
        c.bound[2] = es.tables.opnorm_q3 * gsq * es.v3_0_l2sq / (2.0 * nu);
        for (int f = 0; f < 3; ++f) {
            if (c.estimate[f] > c.bound[f] + 3.0 * c.se[f]) c.pass = false;
        }
        out.push_back(c);
    }
    return out;
}

WeakErrorTable weak_error(const EnsembleStats& es, const TrajectoryStats& limit_stats,
                          const ObservableSet& obs) {
    WeakErrorTable table;
    table.ell = es.ell;
    if (limit_stats.time.size() != es.time.size()) {
        throw std::invalid_argument("weak_error: record grids differ in length");
    }
    for (std::size_t r = 0; r < es.time.size(); ++r) {
        if (std::fabs(limit_stats.time[r] - es.time[r]) > 1e-9) {
            throw std::invalid_argument("weak_error: record grids differ");
        }
    }
    const double inv_m = 1.0 / double(es.n_ok);
    for (std::size_t o = 0; o < obs.size(); ++o) {
        for (std::size_t r = 0; r < es.time.size(); ++r) {
            WeakErrorRow row;
            row.observable = obs.phi[o].name;
            row.t = es.time[r];
            row.err_omega3 =
                std::fabs(es.omega3_mean[o][r] - limit_stats.omega3_obs[o][r]);
            row.se_omega3 = std::sqrt(es.omega3_var[o][r] * inv_m);
            row.err_v3 = std::fabs(es.v3_mean[o][r] - limit_stats.v3_obs[o][r]);
            row.se_v3 = std::sqrt(es.v3_var[o][r] * inv_m);
            table.rows.push_back(row);
        }
    }
    if (!es.omega3_mean_field.empty() && !limit_stats.omega3_fields.empty()) {
        std::vector<double> gap(es.time.size(), 0.0);
        for (std::size_t r = 0; r < es.time.size(); ++r) {
            double acc = 0.0;
            const ScalarField& mw = es.omega3_mean_field[r];
            const ScalarField& mv = es.v3_mean_field[r];
            const ScalarField& lw = limit_stats.omega3_fields[r];
            const ScalarField& lv = limit_stats.v3_fields[r];
            for (std::size_t i = 0; i < mw.c.size(); ++i) {
                acc += std::norm(mw.c[i] - lw.c[i]) + std::norm(mv.c[i] - lv.c[i]);
            }
            gap[r] = acc;
        }
        double integral = 0.0;
        for (std::size_t r = 1; r < gap.size(); ++r) {
            integral += 0.5 * (gap[r] + gap[r - 1]) * (es.time[r] - es.time[r - 1]);
        }
        table.aggregate_l2 = std::sqrt(integral);
    }
    return table;
}

nlohmann::json versions_json() {
    return {{"artifact", "0.1.0"},
            {"compiler", std::string(__VERSION__)},
            {"fftw", std::string(fftw_version)}};
}

nlohmann::json RunManifest::to_json_object() const {
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(config_digest));
    return {{"command", command},
            {"config", config},
            {"config_digest", digest},
            {"seeds", seeds},
            {"versions", versions_json()},
            {"parameters", parameters},
            {"wall_seconds", wall_seconds},
            {"outputs", outputs}};
}

}  // namespace ptlab
