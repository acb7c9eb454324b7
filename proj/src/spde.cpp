#include "ptlab/spde.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptlab/fft.hpp"
#include "ptlab/profile.hpp"
#include "ptlab/spectral_ops.hpp"

namespace ptlab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// scratch for the fused step: five packed backward transforms, two packed
// forward transforms, no per-step allocation after the first call
struct StepScratch {
    std::vector<cplx> cin, cout, ahat, bhat;
    std::vector<double> vh1, vh2, gw1, gw2, gv1, gv2, dw1, dw2, g31, g32;
    std::vector<double> e1, e2;

    void resize(int n) {
        const std::size_t m = std::size_t(n) * n;
        for (auto* p : {&cin, &cout, &ahat, &bhat}) {
            if (p->size() != m) p->assign(m, cplx{0.0, 0.0});
        }
        for (auto* p : {&vh1, &vh2, &gw1, &gw2, &gv1, &gv2, &dw1, &dw2, &g31, &g32}) {
            if (p->size() != m) p->assign(m, 0.0);
        }
        if (e1.size() != std::size_t(n)) {
            e1.assign(n, 0.0);
            e2.assign(n, 0.0);
        }
    }
};

StepScratch& scratch() {
    static thread_local StepScratch s;
    return s;
}

// backward transform of fa + i fb for real fields a, b
void backward_pair(int n, const std::vector<cplx>& packed, double* ra, double* rb,
                   std::vector<cplx>& out) {
    fft_for(n).backward(packed.data(), out.data());
    const std::size_t m = std::size_t(n) * n;
    for (std::size_t i = 0; i < m; ++i) {
        ra[i] = out[i].real();
        rb[i] = out[i].imag();
    }
}

}  // namespace

double tilt_symbol(const Mat2& m, double k1, double k2) {
    return -4.0 * kPi * kPi *
           (m.a[0][0] * k1 * k2 - m.a[0][1] * k1 * k1 + m.a[1][0] * k2 * k2 -
            m.a[1][1] * k1 * k2);
}

std::vector<Observable> default_observables(int n) {
    const FourierGrid g(n);
    auto mode = [&](int k1, int k2, bool sine) {
        ScalarField f(n);
        const cplx up = sine ? cplx{0.0, -0.5} : cplx{0.5, 0.0};
        f.at(g.bin(k1), g.bin(k2)) = up;
        f.at(g.bin(-k1), g.bin(-k2)) = std::conj(up);
        return f;
    };
    std::vector<Observable> out;
    out.push_back({"cos10", mode(1, 0, false)});
    out.push_back({"sin10", mode(1, 0, true)});
    out.push_back({"cos01", mode(0, 1, false)});
    out.push_back({"sin01", mode(0, 1, true)});
    out.push_back({"cos11", mode(1, 1, false)});
    out.push_back({"sin11", mode(1, 1, true)});
    out.push_back({"bump", sample_bump(make_bump(0.3), 1.0, n)});
    return out;
}

State default_initial_state(int n) {
    State s(n);
    s.omega3 = from_real(sample_function(n, [](double x1, double x2) {
        return std::sin(kTwoPi * x1) * std::cos(kTwoPi * x2);
    }));
    s.v3 = from_real(sample_function(n, [](double, double x2) {
        return std::cos(kTwoPi * x2);
    }));
    dealias(s.omega3);
    dealias(s.v3);
    pin_zero_mean(s.omega3);
    pin_zero_mean(s.v3);
    return s;
}

void ito_drift(const State& s, const CovarianceTables& ct, double nu,
               ScalarField& d_omega3, ScalarField& d_v3) {
    const int n = s.omega3.n;
    const VectorField2 vh = biot_savart(s.omega3);
    const VectorField2 gw = apply_gradient(s.omega3);
    const VectorField2 gv = apply_gradient(s.v3);

    const ScalarField aw1 = multiply_dealias(vh.u1, gw.u1);
    const ScalarField aw2 = multiply_dealias(vh.u2, gw.u2);
    const ScalarField av1 = multiply_dealias(vh.u1, gv.u1);
    const ScalarField av2 = multiply_dealias(vh.u2, gv.u2);

    d_omega3 = ScalarField(n);
    d_v3 = ScalarField(n);
    const FourierGrid g(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const double k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double k2 = g.wave(i2);
            if (k1 == 0.0 && k2 == 0.0) continue;
            const double ksq = k1 * k1 + k2 * k2;
            const double quad = ct.q_h0.a[0][0] * k1 * k1 +
                                (ct.q_h0.a[0][1] + ct.q_h0.a[1][0]) * k1 * k2 +
                                ct.q_h0.a[1][1] * k2 * k2;
            const double diag = -4.0 * kPi * kPi * nu * ksq - 2.0 * kPi * kPi * quad;
            const cplx cm = tilt_symbol(ct.grad_qh3_0, k1, k2) * s.v3.at(i1, i2);
            const std::size_t i = g.idx(i1, i2);
            d_omega3.c[i] = -aw1.c[i] - aw2.c[i] + diag * s.omega3.c[i] + cm;
            d_v3.c[i] = -av1.c[i] - av2.c[i] + diag * s.v3.c[i];
        }
    }
}

std::vector<double> if_symbol(const CovarianceTables& ct, double nu, int n) {
    const FourierGrid g(n);
    std::vector<double> lam(g.size(), 0.0);
    for (int i1 = 0; i1 < n; ++i1) {
        const double k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double k2 = g.wave(i2);
            const double quad = ct.q_h0.a[0][0] * k1 * k1 +
                                (ct.q_h0.a[0][1] + ct.q_h0.a[1][0]) * k1 * k2 +
                                ct.q_h0.a[1][1] * k2 * k2;
            lam[g.idx(i1, i2)] =
                4.0 * kPi * kPi * nu * (k1 * k1 + k2 * k2) + 2.0 * kPi * kPi * quad;
        }
    }
    return lam;
}

void noise_term(const State& s, const VectorField2& dw_h, const ScalarField& dw_3,
                ScalarField& n_omega3, ScalarField& n_v3) {
    const int n = s.omega3.n;
    const VectorField2 gw = apply_gradient(s.omega3);
    const VectorField2 gv = apply_gradient(s.v3);
    const VectorField2 oh = apply_gradient(s.v3, /*rotated=*/true);
    const VectorField2 g3 = apply_gradient(dw_3);

    const ScalarField t1 = multiply_dealias(dw_h.u1, gw.u1);
    const ScalarField t2 = multiply_dealias(dw_h.u2, gw.u2);
    const ScalarField s1 = multiply_dealias(oh.u1, g3.u1);
    const ScalarField s2 = multiply_dealias(oh.u2, g3.u2);
    const ScalarField u1 = multiply_dealias(dw_h.u1, gv.u1);
    const ScalarField u2 = multiply_dealias(dw_h.u2, gv.u2);

    n_omega3 = ScalarField(n);
    n_v3 = ScalarField(n);
    for (std::size_t i = 0; i < n_omega3.c.size(); ++i) {
        n_omega3.c[i] = -t1.c[i] - t2.c[i] + s1.c[i] + s2.c[i];
        n_v3.c[i] = -u1.c[i] - u2.c[i];
    }
}

StepAudit::StepAudit(const std::vector<Observable>& obs, int n) {
    for (const Observable& ob : obs) {
        // dealias once so the real-space dot equals the spectral projection
        // of the dealiased increment the step actually applies
        kernels.push_back(to_real(dealiased(ob.phi_hat)));
        if (kernels.back().n != n) {
            throw std::invalid_argument("StepAudit: kernel resolution mismatch");
        }
    }
    qv_v3.assign(obs.size(), 0.0);
    qv_omega3_transport.assign(obs.size(), 0.0);
    qv_omega3_stretch.assign(obs.size(), 0.0);
}

double stability_limit(const State& s, const CovarianceTables& ct) {
    const int n = s.omega3.n;
    const VectorField2 vh = biot_savart(s.omega3);
    const RealField r1 = to_real(vh.u1), r2 = to_real(vh.u2);
    double vinf = 0.0;
    for (std::size_t i = 0; i < r1.v.size(); ++i) {
        vinf = std::max(vinf, std::hypot(r1.v[i], r2.v[i]));
    }
    const double cut = double(n / 3);
    const double inf = std::numeric_limits<double>::infinity();
    const double d_adv = (vinf > 0.0) ? 1.0 / (vinf * kTwoPi * cut) : inf;
    const double d_noise = (ct.opnorm_qh > 0.0)
                               ? 1.0 / (2.0 * kPi * kPi * ct.opnorm_qh * cut * cut)
                               : inf;
    return 0.2 * std::min(d_adv, d_noise);
}

State step_with_increment(const State& s, const SolverConfig& cfg,
                          const CovarianceTables& ct, const VectorField2& dw_h,
                          const ScalarField& dw_3, StepAudit* audit) {
    const int n = cfg.n;
    if (s.omega3.n != n || ct.n != n || dw_h.u1.n != n || dw_3.n != n) {
        throw std::invalid_argument("step: resolution mismatch");
    }
    const FourierGrid g(n);
    const std::size_t m = g.size();
    StepScratch& ws = scratch();
    ws.resize(n);
    const Fft& fft = fft_for(n);

    // v_H and the three gradients, two real fields per transform
    for (int i1 = 0; i1 < n; ++i1) {
        const double k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double k2 = g.wave(i2);
            const double ksq = k1 * k1 + k2 * k2;
            const std::size_t i = g.idx(i1, i2);
            if (ksq == 0.0) {
                ws.cin[i] = cplx{0.0, 0.0};
            } else {
                const cplx b = s.omega3.c[i] * cplx{0.0, 1.0} / (kTwoPi * ksq);
                ws.cin[i] = b * (-k2) + cplx{0.0, 1.0} * (b * k1);
            }
        }
    }
    backward_pair(n, ws.cin, ws.vh1.data(), ws.vh2.data(), ws.cout);

    const auto grad_pack = [&](const ScalarField& f, double* r1, double* r2) {
        for (int i1 = 0; i1 < n; ++i1) {
            const double k1 = g.wave(i1);
            for (int i2 = 0; i2 < n; ++i2) {
                const double k2 = g.wave(i2);
                const std::size_t i = g.idx(i1, i2);
                const cplx d1 = cplx{0.0, kTwoPi * k1} * f.c[i];
                const cplx d2 = cplx{0.0, kTwoPi * k2} * f.c[i];
                ws.cin[i] = d1 + cplx{0.0, 1.0} * d2;
            }
        }
        backward_pair(n, ws.cin, r1, r2, ws.cout);
    };
    grad_pack(s.omega3, ws.gw1.data(), ws.gw2.data());
    grad_pack(s.v3, ws.gv1.data(), ws.gv2.data());
    grad_pack(dw_3, ws.g31.data(), ws.g32.data());

    for (std::size_t i = 0; i < m; ++i) {
        ws.cin[i] = dw_h.u1.c[i] + cplx{0.0, 1.0} * dw_h.u2.c[i];
    }
    backward_pair(n, ws.cin, ws.dw1.data(), ws.dw2.data(), ws.cout);

    // transport pair: -(v_H . grad omega3) + i * -(v_H . grad v3)
    for (std::size_t i = 0; i < m; ++i) {
        ws.cin[i] = cplx{-(ws.vh1[i] * ws.gw1[i] + ws.vh2[i] * ws.gw2[i]),
                         -(ws.vh1[i] * ws.gv1[i] + ws.vh2[i] * ws.gv2[i])};
    }
    fft.forward(ws.cin.data(), ws.ahat.data());

    // noise pair: omega_H = (d2 v3, -d1 v3) = (gv2, -gv1)
    for (std::size_t i = 0; i < m; ++i) {
        ws.cin[i] = cplx{-(ws.dw1[i] * ws.gw1[i] + ws.dw2[i] * ws.gw2[i]) +
                             (ws.gv2[i] * ws.g31[i] - ws.gv1[i] * ws.g32[i]),
                         -(ws.dw1[i] * ws.gv1[i] + ws.dw2[i] * ws.gv2[i])};
    }
    fft.forward(ws.cin.data(), ws.bhat.data());

    if (audit) {
        // squared kernel projections of the three martingale pieces, from
        // the same real-space products the packed transform consumed
        for (std::size_t j = 0; j < audit->kernels.size(); ++j) {
            const double* phi = audit->kernels[j].v.data();
            double tw = 0.0, st = 0.0, tv = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                tw -= phi[i] * (ws.dw1[i] * ws.gw1[i] + ws.dw2[i] * ws.gw2[i]);
                st += phi[i] * (ws.gv2[i] * ws.g31[i] - ws.gv1[i] * ws.g32[i]);
                tv -= phi[i] * (ws.dw1[i] * ws.gv1[i] + ws.dw2[i] * ws.gv2[i]);
            }
            const double scale = 1.0 / (double(m) * m);
            audit->qv_omega3_transport[j] = tw * tw * scale;
            audit->qv_omega3_stretch[j] = st * st * scale;
            audit->qv_v3[j] = tv * tv * scale;
        }
        audit->v3_noise_energy = 0.0;
    }

    // separable integrating factor; the cross term only matters for an
    // anisotropic Q_H(0)
    const double q00 = ct.q_h0.a[0][0], q11 = ct.q_h0.a[1][1];
    const double q01s = ct.q_h0.a[0][1] + ct.q_h0.a[1][0];
    for (int i = 0; i < n; ++i) {
        const double k = g.wave(i);
        ws.e1[i] = std::exp(-(4.0 * kPi * kPi * cfg.nu + 2.0 * kPi * kPi * q00) * k * k *
                            cfg.dt);
        ws.e2[i] = std::exp(-(4.0 * kPi * kPi * cfg.nu + 2.0 * kPi * kPi * q11) * k * k *
                            cfg.dt);
    }
    const bool with_cross = std::fabs(q01s) > 1e-13;

    State out(n);
    out.t = s.t + cfg.dt;
    const int cut = n / 3;
    double worst = 0.0;
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        const int i1m = (n - i1) % n;
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            if ((k1 == 0 && k2 == 0) || std::abs(k1) > cut || std::abs(k2) > cut) {
                continue;
            }
            const std::size_t i = g.idx(i1, i2);
            const std::size_t im = g.idx(i1m, (n - i2) % n);
            // unscramble the packed products
            const cplx aw = 0.5 * (ws.ahat[i] + std::conj(ws.ahat[im]));
            const cplx av = cplx{0.0, -0.5} * (ws.ahat[i] - std::conj(ws.ahat[im]));
            const cplx nw = 0.5 * (ws.bhat[i] + std::conj(ws.bhat[im]));
            const cplx nv = cplx{0.0, -0.5} * (ws.bhat[i] - std::conj(ws.bhat[im]));

            double decay = ws.e1[i1] * ws.e2[i2];
            if (with_cross) {
                decay *= std::exp(-2.0 * kPi * kPi * q01s * double(k1) * k2 * cfg.dt);
            }
            const cplx cm = tilt_symbol(ct.grad_qh3_0, k1, k2) * s.v3.c[i];
            const cplx w_new = decay * (s.omega3.c[i] + cfg.dt * (aw + cm) + nw);
            const cplx v_new = decay * (s.v3.c[i] + cfg.dt * av + nv);
            if (audit) {
                const cplx vp = decay * (s.v3.c[i] + cfg.dt * av);
                const cplx nvd = decay * nv;
                audit->v3_noise_energy +=
                    2.0 * (vp.real() * nvd.real() + vp.imag() * nvd.imag()) +
                    std::norm(nvd);
            }
            out.omega3.c[i] = w_new;
            out.v3.c[i] = v_new;
            worst = std::max(worst, std::max(std::abs(w_new), std::abs(v_new)));
        }
    }
    if (!std::isfinite(worst) || worst > 1e50) {
        throw std::runtime_error("trajectory blow-up at t = " + std::to_string(out.t) +
                                 ", coefficient magnitude " + std::to_string(worst));
    }
    return out;
}

State step(const State& s, const SolverConfig& cfg, const SpectralNoise& sn,
           const CovarianceTables& ct, GaussianStream& gs, StepAudit* audit) {
    VectorField2 dw_h;
    ScalarField dw_3;
    sample_increment(sn, cfg.dt, gs, dw_h, dw_3);
    return step_with_increment(s, cfg, ct, dw_h, dw_3, audit);
}

std::pair<State, TrajectoryStats> run_trajectory(const State& init, const SolverConfig& cfg,
                                                 const SpectralNoise& sn,
                                                 const CovarianceTables& ct,
                                                 const std::vector<Observable>& obs) {
    if (cfg.t_end <= 0.0 || cfg.dt <= 0.0) {
        throw std::invalid_argument("run_trajectory: need positive dt and t_end");
    }
    const long long n_steps = std::llround(cfg.t_end / cfg.dt);
    if (n_steps < 1 || std::fabs(double(n_steps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end) {
        throw std::invalid_argument("run_trajectory: t_end must be a whole number of steps");
    }

    State cur = init;
    dealias(cur.omega3);
    dealias(cur.v3);
    pin_zero_mean(cur.omega3);
    pin_zero_mean(cur.v3);

    const double limit = stability_limit(cur, ct);
    if (cfg.dt > limit * (1.0 + 1e-12)) {
        throw std::invalid_argument("run_trajectory: dt " + std::to_string(cfg.dt) +
                                    " exceeds the stability limit " + std::to_string(limit));
    }

    TrajectoryStats stats;
    for (const Observable& ob : obs) stats.observable_names.push_back(ob.name);
    stats.omega3_obs.resize(obs.size());
    stats.v3_obs.resize(obs.size());
    stats.qv_v3.resize(obs.size());
    stats.qv_omega3_transport.resize(obs.size());
    stats.qv_omega3_stretch.resize(obs.size());

    const double w0_sq = l2_norm_sq(cur.omega3), v0_sq = l2_norm_sq(cur.v3);
    const double fourth_ref = w0_sq * w0_sq + v0_sq * v0_sq;

    StepAudit audit(obs, cfg.n);
    double noise_in = 0.0;
    std::vector<double> cum_tv(obs.size(), 0.0), cum_tw(obs.size(), 0.0),
        cum_sw(obs.size(), 0.0);

    const auto record = [&](const State& s) {
        const double wsq = l2_norm_sq(s.omega3), vsq = l2_norm_sq(s.v3);
        stats.time.push_back(s.t);
        stats.v3_l2sq.push_back(vsq);
        stats.omega3_l2sq.push_back(wsq);
        stats.grad_v3_l2sq.push_back(l2_norm_sq(derivative(s.v3, 0)) +
                                     l2_norm_sq(derivative(s.v3, 1)));
        stats.grad_omega3_l2sq.push_back(l2_norm_sq(derivative(s.omega3, 0)) +
                                         l2_norm_sq(derivative(s.omega3, 1)));
        stats.omega3_l4.push_back(wsq * wsq);
        stats.v3_noise_input.push_back(noise_in);
        for (std::size_t o = 0; o < obs.size(); ++o) {
            stats.omega3_obs[o].push_back(l2_inner(s.omega3, obs[o].phi_hat));
            stats.v3_obs[o].push_back(l2_inner(s.v3, obs[o].phi_hat));
            stats.qv_v3[o].push_back(cum_tv[o]);
            stats.qv_omega3_transport[o].push_back(cum_tw[o]);
            stats.qv_omega3_stretch[o].push_back(cum_sw[o]);
        }
        if (cfg.fourth_moment_cap > 0.0 && wsq * wsq > cfg.fourth_moment_cap * fourth_ref) {
            stats.fourth_moment_exceeded = true;
        }
        if (cfg.keep_fields) {
            stats.omega3_fields.push_back(s.omega3);
            stats.v3_fields.push_back(s.v3);
        }
    };

    record(cur);
    GaussianStream gs(cfg.seed);
    for (long long k = 1; k <= n_steps; ++k) {
        cur = step(cur, cfg, sn, ct, gs, &audit);
        noise_in += audit.v3_noise_energy;
        for (std::size_t o = 0; o < obs.size(); ++o) {
            cum_tv[o] += audit.qv_v3[o];
            cum_tw[o] += audit.qv_omega3_transport[o];
            cum_sw[o] += audit.qv_omega3_stretch[o];
        }
        if (k % cfg.record_every == 0 || k == n_steps) record(cur);
    }
    return {std::move(cur), std::move(stats)};
}

}  // namespace ptlab
