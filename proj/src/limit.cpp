#include "ptlab/limit.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "ptlab/spectral_ops.hpp"

namespace ptlab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// cyclic Jacobi on a symmetric 4x4; plenty for the uniqueness block
std::array<double, 4> symmetric_eigen4(std::array<std::array<double, 4>, 4> m) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) off += m[p][q] * m[p][q];
        }
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (std::fabs(m[p][q]) < 1e-18) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int r = 0; r < 4; ++r) {
                    const double mrp = m[r][p], mrq = m[r][q];
                    m[r][p] = c * mrp - s * mrq;
                    m[r][q] = s * mrp + c * mrq;
                }
                for (int r = 0; r < 4; ++r) {
                    const double mpr = m[p][r], mqr = m[q][r];
                    m[p][r] = c * mpr - s * mqr;
                    m[q][r] = s * mpr + c * mqr;
                }
            }
        }
    }
    return {m[0][0], m[1][1], m[2][2], m[3][3]};
}

// per-mode linear data: decay rate and the triangular AKA coupling
struct LinearTables {
    int n = 0;
    std::vector<double> lam, tilt;
};

LinearTables linear_tables(const LimitParams& p, int n) {
    const FourierGrid g(n);
    LinearTables t;
    t.n = n;
    t.lam.resize(g.size());
    t.tilt.resize(g.size());
    for (int i1 = 0; i1 < n; ++i1) {
        const double k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double k2 = g.wave(i2);
            const double quad = p.qbar.a[0][0] * k1 * k1 +
                                (p.qbar.a[0][1] + p.qbar.a[1][0]) * k1 * k2 +
                                p.qbar.a[1][1] * k2 * k2;
            const std::size_t i = g.idx(i1, i2);
            t.lam[i] = 4.0 * kPi * kPi * p.nu * (k1 * k1 + k2 * k2) + 2.0 * kPi * kPi * quad;
            t.tilt[i] = tilt_symbol(p.a, k1, k2);
        }
    }
    return t;
}

// exact exponential of the block [[-lam, c], [0, -lam]] over time h
void propagate(const LinearTables& t, double h, ScalarField& w, ScalarField& v) {
    for (std::size_t i = 0; i < w.c.size(); ++i) {
        const double e = std::exp(-t.lam[i] * h);
        w.c[i] = e * (w.c[i] + h * t.tilt[i] * v.c[i]);
        v.c[i] *= e;
    }
}

struct Pair {
    ScalarField w, v;
    explicit Pair(int n) : w(n), v(n) {}
};

// minus the advection, dealiased; the only Runge-Kutta nonlinearity
Pair advection(const ScalarField& w, const ScalarField& v) {
    const VectorField2 vh = biot_savart(w);
    const VectorField2 gw = apply_gradient(w);
    const VectorField2 gv = apply_gradient(v);
    Pair out(w.n);
    const ScalarField a1 = multiply_dealias(vh.u1, gw.u1);
    const ScalarField a2 = multiply_dealias(vh.u2, gw.u2);
    const ScalarField b1 = multiply_dealias(vh.u1, gv.u1);
    const ScalarField b2 = multiply_dealias(vh.u2, gv.u2);
    for (std::size_t i = 0; i < out.w.c.size(); ++i) {
        out.w.c[i] = -a1.c[i] - a2.c[i];
        out.v.c[i] = -b1.c[i] - b2.c[i];
    }
    pin_zero_mean(out.w);
    pin_zero_mean(out.v);
    return out;
}

State lawson_step(const State& s, const LinearTables& t, double dt) {
    const int n = s.omega3.n;
    const double h = 0.5 * dt;

    const Pair n1 = advection(s.omega3, s.v3);

    ScalarField w2 = s.omega3, v2 = s.v3;
    for (std::size_t i = 0; i < w2.c.size(); ++i) {
        w2.c[i] += h * n1.w.c[i];
        v2.c[i] += h * n1.v.c[i];
    }
    propagate(t, h, w2, v2);
    const Pair n2 = advection(w2, v2);

    ScalarField w3 = s.omega3, v3 = s.v3;
    propagate(t, h, w3, v3);
    for (std::size_t i = 0; i < w3.c.size(); ++i) {
        w3.c[i] += h * n2.w.c[i];
        v3.c[i] += h * n2.v.c[i];
    }
    const Pair n3 = advection(w3, v3);

    ScalarField w4 = s.omega3, v4 = s.v3;
    propagate(t, dt, w4, v4);
    ScalarField nw3 = n3.w, nv3 = n3.v;
    propagate(t, h, nw3, nv3);
    for (std::size_t i = 0; i < w4.c.size(); ++i) {
        w4.c[i] += dt * nw3.c[i];
        v4.c[i] += dt * nv3.c[i];
    }
    const Pair n4 = advection(w4, v4);

    State out(n);
    out.t = s.t + dt;
    ScalarField ew1 = n1.w, ev1 = n1.v;
    propagate(t, dt, ew1, ev1);
    ScalarField ew2 = n2.w, ev2 = n2.v;
    propagate(t, h, ew2, ev2);
    // n3 propagated over h already sits in nw3/nv3
    out.omega3 = s.omega3;
    out.v3 = s.v3;
    propagate(t, dt, out.omega3, out.v3);
    const double c = dt / 6.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < out.omega3.c.size(); ++i) {
        out.omega3.c[i] +=
            c * (ew1.c[i] + 2.0 * ew2.c[i] + 2.0 * nw3.c[i] + n4.w.c[i]);
        out.v3.c[i] += c * (ev1.c[i] + 2.0 * ev2.c[i] + 2.0 * nv3.c[i] + n4.v.c[i]);
        worst = std::max(worst,
                         std::max(std::abs(out.omega3.c[i]), std::abs(out.v3.c[i])));
    }
    if (!std::isfinite(worst) || worst > 1e50) {
        throw std::runtime_error("limit trajectory blow-up at t = " +
                                 std::to_string(out.t));
    }
    return out;
}

}  // namespace

LimitParams limit_params_from(const CovarianceTables& ct, double nu) {
    LimitParams p;
    p.nu = nu;
    p.qbar = ct.q_h0;
    p.a = ct.grad_qh3_0;
    return p;
}

UniquenessVerdict uniqueness_condition(const LimitParams& p, int samples) {
    // y_perp = R y with R = [[0,1],[-1,0]], so the cross block is A R
    const Mat2 r = Mat2::rotation(1.0);
    Mat2 ar;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ar.a[i][j] = p.a.a[i][0] * r.a[0][j] + p.a.a[i][1] * r.a[1][j];
        }
    }
    std::array<std::array<double, 4>, 4> m{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m[i][j] = p.qbar.a[i][j];
            m[i + 2][j + 2] = p.qbar.a[i][j];
            m[i][j + 2] = ar.a[i][j];
            m[j + 2][i] = ar.a[i][j];
        }
    }
    // symmetrize against qbar rounding
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const double avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = m[j][i] = avg;
        }
    }

    UniquenessVerdict out;
    const std::array<double, 4> ev = symmetric_eigen4(m);
    out.min_eigenvalue = ev[0];
    for (double e : ev) out.min_eigenvalue = std::min(out.min_eigenvalue, e);
    out.pass = out.min_eigenvalue >= -1e-12;

    out.min_sampled = out.min_eigenvalue;
    if (samples > 0) {
        double best = 1e300;
        for (int s = 0; s < samples; ++s) {
            // low-discrepancy directions on the 3-sphere
            double z[4];
            double nrm = 0.0;
            for (int d = 0; d < 4; ++d) {
                const double u = std::fmod(0.5 + (s + 1) * 0.5 * std::sqrt(2.0 + d), 1.0);
                z[d] = std::cos(kTwoPi * u) * std::sqrt(-2.0 * std::log(0.5 + 0.499 * u));
                nrm += z[d] * z[d];
            }
            nrm = std::sqrt(nrm);
            double val = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) val += z[i] * m[i][j] * z[j];
            }
            best = std::min(best, val / (nrm * nrm));
        }
        out.min_sampled = best;
    }
    return out;
}

void limit_rhs(const State& s, const LimitParams& p, ScalarField& d_omega3,
               ScalarField& d_v3) {
    const int n = s.omega3.n;
    const Pair adv = advection(s.omega3, s.v3);
    const LinearTables t = linear_tables(p, n);
    d_omega3 = ScalarField(n);
    d_v3 = ScalarField(n);
    for (std::size_t i = 0; i < d_omega3.c.size(); ++i) {
        d_omega3.c[i] =
            adv.w.c[i] - t.lam[i] * s.omega3.c[i] + t.tilt[i] * s.v3.c[i];
        d_v3.c[i] = adv.v.c[i] - t.lam[i] * s.v3.c[i];
    }
    pin_zero_mean(d_omega3);
    pin_zero_mean(d_v3);
}

double limit_stability(const State& s) {
    const int n = s.omega3.n;
    const VectorField2 vh = biot_savart(s.omega3);
    const RealField r1 = to_real(vh.u1), r2 = to_real(vh.u2);
    double vinf = 0.0;
    for (std::size_t i = 0; i < r1.v.size(); ++i) {
        vinf = std::max(vinf, std::hypot(r1.v[i], r2.v[i]));
    }
    if (vinf == 0.0) return 1e300;
    return 0.2 / (vinf * kTwoPi * double(n / 3));
}

State limit_step(const State& s, const LimitParams& p, double dt) {
    return lawson_step(s, linear_tables(p, s.omega3.n), dt);
}

std::pair<State, TrajectoryStats> run_limit(const State& init, const LimitParams& p,
                                            const LimitConfig& cfg,
                                            const std::vector<Observable>& obs) {
    if (cfg.t_end <= 0.0 || cfg.dt <= 0.0) {
        throw std::invalid_argument("run_limit: need positive dt and t_end");
    }
    const long long n_steps = std::llround(cfg.t_end / cfg.dt);
    if (n_steps < 1 || std::fabs(double(n_steps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end) {
        throw std::invalid_argument("run_limit: t_end must be a whole number of steps");
    }
    State cur = init;
    if (cur.omega3.n != cfg.n) throw std::invalid_argument("run_limit: resolution mismatch");
    dealias(cur.omega3);
    dealias(cur.v3);
    pin_zero_mean(cur.omega3);
    pin_zero_mean(cur.v3);
    if (cfg.dt > limit_stability(cur) * (1.0 + 1e-12)) {
        throw std::invalid_argument("run_limit: dt exceeds the advective limit");
    }

    const LinearTables t = linear_tables(p, cfg.n);

    TrajectoryStats stats;
    for (const Observable& ob : obs) stats.observable_names.push_back(ob.name);
    stats.omega3_obs.resize(obs.size());
    stats.v3_obs.resize(obs.size());
    const auto record = [&](const State& s) {
        const double wsq = l2_norm_sq(s.omega3);
        stats.time.push_back(s.t);
        stats.v3_l2sq.push_back(l2_norm_sq(s.v3));
        stats.omega3_l2sq.push_back(wsq);
        stats.grad_v3_l2sq.push_back(l2_norm_sq(derivative(s.v3, 0)) +
                                     l2_norm_sq(derivative(s.v3, 1)));
        stats.grad_omega3_l2sq.push_back(l2_norm_sq(derivative(s.omega3, 0)) +
                                         l2_norm_sq(derivative(s.omega3, 1)));
        stats.omega3_l4.push_back(wsq * wsq);
        for (std::size_t o = 0; o < obs.size(); ++o) {
            stats.omega3_obs[o].push_back(l2_inner(s.omega3, obs[o].phi_hat));
            stats.v3_obs[o].push_back(l2_inner(s.v3, obs[o].phi_hat));
        }
        if (cfg.keep_fields) {
            stats.omega3_fields.push_back(s.omega3);
            stats.v3_fields.push_back(s.v3);
        }
    };

    record(cur);
    for (long long k = 1; k <= n_steps; ++k) {
        cur = lawson_step(cur, t, cfg.dt);
        if (k % cfg.record_every == 0 || k == n_steps) record(cur);
    }
    return {std::move(cur), std::move(stats)};
}

}  // namespace ptlab
