#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ptlab/limit.hpp"
#include "ptlab/spectral_ops.hpp"

using namespace ptlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

LimitParams isotropic_params(double nu, double kappa, double q0) {
    LimitParams p;
    p.nu = nu;
    p.qbar = Mat2::identity(2.0 * kappa);
    p.a = Mat2::rotation(2.0 * kappa * q0);
    return p;
}

ScalarField wavy_field(int n, int kmax, unsigned salt) {
    RealField r(n);
    const FourierGrid g(n);
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            double acc = 0.0;
            for (int k1 = -kmax; k1 <= kmax; ++k1) {
                for (int k2 = -kmax; k2 <= kmax; ++k2) {
                    if (k1 == 0 && k2 == 0) continue;
                    const double ph = 1.7 * k1 - 0.61 * k2 + 0.327 * salt * (k1 + 2 * k2);
                    acc += std::sin(kTwoPi * (k1 * g.coord(i1) + k2 * g.coord(i2)) + ph) /
                           (1.0 + k1 * k1 + k2 * k2);
                }
            }
            r.at(i1, i2) = acc;
        }
    }
    ScalarField f = from_real(r);
    pin_zero_mean(f);
    return f;
}

double max_coeff_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}
}  // namespace

TEST_CASE("uniqueness condition over the rotation family") {
    // Qbar = 2 kappa I, A = 2 kappa q0 R has eigenvalues 2 kappa (1 +- q0)
    const double kappa = 0.25;
    for (double q0 : {-1.0, 0.0, 0.5, 1.0}) {
        const UniquenessVerdict v = uniqueness_condition(isotropic_params(0.05, kappa, q0));
        CHECK(v.pass);
        CHECK(v.min_eigenvalue ==
              doctest::Approx(2.0 * kappa * (1.0 - std::fabs(q0))).epsilon(1e-10));
    }

    const UniquenessVerdict bad =
        uniqueness_condition(isotropic_params(0.05, kappa, 1.5), 4096);
    CHECK(!bad.pass);
    CHECK(bad.min_eigenvalue == doctest::Approx(-0.25).epsilon(1e-10));
    // sampling can only overestimate the minimum
    CHECK(bad.min_sampled >= bad.min_eigenvalue - 1e-12);
    CHECK(bad.min_sampled < 0.0);

    // A = 0 with any nonnegative Qbar passes
    LimitParams p;
    p.qbar.a[0][0] = 0.7;
    p.qbar.a[0][1] = p.qbar.a[1][0] = 0.3;
    p.qbar.a[1][1] = 0.2;  // eigenvalues 0.45 +- sqrt(0.0625+0.09) > 0
    CHECK(uniqueness_condition(p).pass);
}

TEST_CASE("limit right side: degenerate parameters give plain Navier-Stokes") {
    const int n = 32;
    LimitParams p;
    p.nu = 0.07;

    State st(n);
    st.omega3 = wavy_field(n, 4, 1);
    st.v3 = wavy_field(n, 4, 2);

    ScalarField dw, dv;
    limit_rhs(st, p, dw, dv);

    // independent assembly from the public pieces
    const VectorField2 vh = biot_savart(st.omega3);
    const VectorField2 gw = apply_gradient(st.omega3);
    const VectorField2 gv = apply_gradient(st.v3);
    const ScalarField a1 = multiply_dealias(vh.u1, gw.u1);
    const ScalarField a2 = multiply_dealias(vh.u2, gw.u2);
    const ScalarField b1 = multiply_dealias(vh.u1, gv.u1);
    const ScalarField b2 = multiply_dealias(vh.u2, gv.u2);
    const ScalarField lw = laplacian(st.omega3);
    const ScalarField lv = laplacian(st.v3);
    double worst = 0.0;
    for (std::size_t i = 0; i < dw.c.size(); ++i) {
        worst = std::max(worst,
                         std::abs(dw.c[i] - (-a1.c[i] - a2.c[i] + p.nu * lw.c[i])));
        worst = std::max(worst,
                         std::abs(dv.c[i] - (-b1.c[i] - b2.c[i] + p.nu * lv.c[i])));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("AKA term: single-mode oracle and one-way coupling") {
    const int n = 32;
    const FourierGrid g(n);
    LimitParams p = isotropic_params(0.05, 0.25, 1.0);  // A = 0.5 R

    State st(n);
    st.v3.at(g.bin(0), g.bin(1)) = cplx{0.0, -0.5};
    st.v3.at(g.bin(0), g.bin(-1)) = cplx{0.0, 0.5};

    ScalarField dw, dv;
    limit_rhs(st, p, dw, dv);

    // div[A grad^perp sin(2 pi x2)] = 2 pi^2 sin(2 pi x2) for A = R/2
    const cplx expect = 2.0 * kPi * kPi * cplx{0.0, -0.5};
    CHECK(std::abs(dw.at(g.bin(0), g.bin(1)) - expect) < 1e-12);
    CHECK(std::abs(dw.at(g.bin(0), g.bin(-1)) - std::conj(expect)) < 1e-12);

    // though omega3 = 0, its derivative is already nonzero: the coupling
    // runs v3 -> omega3 and never back
    CHECK(l2_norm_sq(dw) > 1e-4);
    const double lam = 4.0 * kPi * kPi * (0.05 + 0.25);
    CHECK(std::abs(dv.at(g.bin(0), g.bin(1)) - (-lam) * cplx{0.0, -0.5}) < 1e-12);

    // adjoint pairing of the first-order term on scrambled fields
    State rnd(n);
    rnd.omega3 = wavy_field(n, 5, 3);
    rnd.v3 = wavy_field(n, 5, 4);
    ScalarField tilt(n);
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            tilt.at(i1, i2) =
                tilt_symbol(p.a, g.wave(i1), g.wave(i2)) * rnd.v3.at(i1, i2);
        }
    }
    const VectorField2 oh = apply_gradient(rnd.v3, true);
    VectorField2 aoh(n);
    for (std::size_t i = 0; i < aoh.u1.c.size(); ++i) {
        aoh.u1.c[i] = p.a.a[0][0] * oh.u1.c[i] + p.a.a[0][1] * oh.u2.c[i];
        aoh.u2.c[i] = p.a.a[1][0] * oh.u1.c[i] + p.a.a[1][1] * oh.u2.c[i];
    }
    const VectorField2 go = apply_gradient(rnd.omega3);
    const double direct = l2_inner(rnd.omega3, tilt);
    const double adjoint = -(l2_inner(go.u1, aoh.u1) + l2_inner(go.u2, aoh.u2));
    CHECK(std::fabs(direct - adjoint) < 1e-10 * std::fabs(direct));
}

TEST_CASE("mirror-symmetric limit equals Navier-Stokes with nu + kappa") {
    const int n = 32;
    const double nu = 0.02, kappa = 0.25;

    LimitConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.record_every = 20;

    const State init = default_initial_state(n);
    auto [fa, sa] = run_limit(init, isotropic_params(nu, kappa, 0.0), cfg);

    LimitParams ns;
    ns.nu = nu + kappa;
    auto [fb, sb] = run_limit(init, ns, cfg);

    CHECK(max_coeff_diff(fa.omega3, fb.omega3) < 1e-10);
    CHECK(max_coeff_diff(fa.v3, fb.v3) < 1e-10);

    // energy decays monotonically without the AKA source
    for (std::size_t k = 1; k < sa.time.size(); ++k) {
        CHECK(sa.v3_l2sq[k] < sa.v3_l2sq[k - 1]);
        CHECK(sa.omega3_l2sq[k] < sa.omega3_l2sq[k - 1]);
    }
}

TEST_CASE("identical initial fields stay identical when A = 0") {
    const int n = 32;
    LimitConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;

    State init(n);
    init.omega3 = wavy_field(n, 4, 7);
    init.v3 = init.omega3;
    auto [fin, st] = run_limit(init, isotropic_params(0.03, 0.1, 0.0), cfg);
    CHECK(max_coeff_diff(fin.omega3, fin.v3) < 1e-12);
}

TEST_CASE("dissipation identity to quadrature accuracy") {
    // d||v3||^2/dt = -2 nu ||grad v3||^2 - <grad v3, Qbar grad v3>; with
    // Qbar = 2 kappa I both terms fold into 2 (nu + kappa).  Records at
    // every step feed a Simpson integral, so the defect is dominated by the
    // fourth-order time discretization.
    const int n = 32;
    const double nu = 0.05, kappa = 0.1;
    LimitConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;

    auto [fin, st] = run_limit(default_initial_state(n), isotropic_params(nu, kappa, 0.0), cfg);
    REQUIRE(st.time.size() % 2 == 1);
    double dissip = 0.0;
    for (std::size_t k = 2; k < st.time.size(); k += 2) {
        dissip += (st.grad_v3_l2sq[k - 2] + 4.0 * st.grad_v3_l2sq[k - 1] +
                   st.grad_v3_l2sq[k]) *
                  (st.time[k] - st.time[k - 2]) / 6.0;
    }
    const double resid =
        st.v3_l2sq.back() - st.v3_l2sq.front() + 2.0 * (nu + kappa) * dissip;
    CHECK(std::fabs(resid) < 1e-10 * st.v3_l2sq.front());
}

TEST_CASE("temporal self-convergence at fourth order") {
    const int n = 32;
    const LimitParams p = isotropic_params(0.02, 0.125, 0.5);

    LimitConfig cfg;
    cfg.n = n;
    cfg.t_end = 0.1;

    // the sine-product state drives a healthy advection term; error floors
    // sit near 1e-14, three decades under the coarsest run
    const State init = default_initial_state(n);

    const auto final_at = [&](double dt) {
        LimitConfig c = cfg;
        c.dt = dt;
        return run_limit(init, p, c).first;
    };
    const State ref = final_at(1.25e-4);
    double err[3];
    int idx = 0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const State s = final_at(dt);
        ScalarField dw = s.omega3, dv = s.v3;
        for (std::size_t i = 0; i < dw.c.size(); ++i) {
            dw.c[i] -= ref.omega3.c[i];
            dv.c[i] -= ref.v3.c[i];
        }
        err[idx++] = std::sqrt(l2_norm_sq(dw) + l2_norm_sq(dv));
    }
    const double s1 = std::log2(err[0] / err[1]);
    const double s2 = std::log2(err[1] / err[2]);
    CHECK(s1 > 3.4);
    CHECK(s1 < 4.6);
    CHECK(s2 > 3.2);
    CHECK(s2 < 4.8);
}

TEST_CASE("AKA growth probe against the defective-block solution") {
    // strongly outside the uniqueness region: A = 1.5 R.  The per-mode
    // linearization [[-lam, c], [0, -lam]] is a Jordan block, so the seeded
    // mode grows like c t exp(-lam t) before advection feedback kicks in.
    const int n = 32;
    const double kappa = 0.25, q0 = 3.0, nu = 0.05;
    const LimitParams p = isotropic_params(nu, kappa, q0);
    CHECK(!uniqueness_condition(p).pass);

    const FourierGrid g(n);
    const double eps = 1e-3;
    State init(n);
    init.v3.at(g.bin(0), g.bin(1)) = eps * cplx{0.0, -0.5};
    init.v3.at(g.bin(0), g.bin(-1)) = eps * cplx{0.0, 0.5};

    LimitConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    auto [fin, st] = run_limit(init, p, cfg);

    const double lam = 4.0 * kPi * kPi * (nu + kappa);
    const double c = 4.0 * kPi * kPi * 2.0 * kappa * q0;  // tilt symbol at k = (0, 1)
    const cplx predict =
        c * cfg.t_end * std::exp(-lam * cfg.t_end) * (eps * cplx{0.0, -0.5});
    const cplx got = fin.omega3.at(g.bin(0), g.bin(1));
    CHECK(std::abs(got - predict) < 0.02 * std::abs(predict));
    // the seeded vorticity mode grew from zero by orders of magnitude
    CHECK(std::abs(got) > 50.0 * eps * 0.5 * 1e-2);
}

TEST_CASE("limit guards") {
    const int n = 32;
    const LimitParams p = isotropic_params(0.05, 0.1, 0.0);
    const State init = default_initial_state(n);

    LimitConfig cfg;
    cfg.n = n;
    cfg.t_end = 0.05;
    cfg.dt = 100.0 * limit_stability(init);
    CHECK_THROWS_AS(run_limit(init, p, cfg), std::invalid_argument);

    cfg.dt = 1e-3;
    cfg.t_end = 0.05 + 0.4e-3;
    CHECK_THROWS_AS(run_limit(init, p, cfg), std::invalid_argument);

    State wrong(16);
    cfg.t_end = 0.05;
    CHECK_THROWS_AS(run_limit(wrong, p, cfg), std::invalid_argument);
}
