#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ptlab/spectral_ops.hpp"
#include "ptlab/torus_green.hpp"

using namespace ptlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("E1 helpers") {
    // E1(1) = 0.2193839343955203
    CHECK(std::fabs(exp_int_e1(1.0) - 0.2193839343955203) < 1e-14);
    // small-x series agrees with the direct evaluation where both work
    for (double x : {0.25, 0.5, 0.9}) {
        CHECK(std::fabs(e1_plus_log(x) - (exp_int_e1(x) + std::log(x))) < 1e-13);
    }
    // limit value -euler_gamma at x = 0
    CHECK(std::fabs(e1_plus_log(0.0) + 0.5772156649015329) < 1e-14);
}

TEST_CASE("splitting parameter does not change values") {
    TorusGreen g1(0.02), g2(0.045);
    const double pts[][2] = {{0.13, 0.02}, {0.31, -0.24}, {0.5, 0.5}, {0.02, 0.45}};
    for (auto& p : pts) {
        CHECK(std::fabs(g1.periodic(p[0], p[1]) - g2.periodic(p[0], p[1])) < 1e-12);
        CHECK(std::fabs(g1.regular(p[0], p[1]) - g2.regular(p[0], p[1])) < 1e-12);
    }
    CHECK(std::fabs(g1.regular(0.0, 0.0) - g2.regular(0.0, 0.0)) < 1e-12);
}

TEST_CASE("lattice symmetries") {
    TorusGreen g(0.02);
    CHECK(std::fabs(g.periodic(0.17, 0.29) - g.periodic(-0.17, -0.29)) < 1e-13);
    CHECK(std::fabs(g.periodic(0.17, 0.29) - g.periodic(0.29, 0.17)) < 1e-13);
    // periodicity
    CHECK(std::fabs(g.periodic(0.17, 0.29) - g.periodic(0.17 - 1.0, 0.29 + 1.0)) < 1e-12);
}

TEST_CASE("regular part is the Green function plus the logarithm") {
    TorusGreen g(0.02);
    const double a1 = 0.2, a2 = 0.1;
    const double want = g.periodic(a1, a2) + std::log(std::hypot(a1, a2)) / (2.0 * kPi);
    CHECK(std::fabs(g.regular(a1, a2) - want) < 1e-13);
}

TEST_CASE("gradients against finite differences") {
    TorusGreen g(0.02);
    const double h = 1e-5;
    for (auto& p : {std::pair{0.11, -0.07}, std::pair{0.31, 0.22}, std::pair{0.005, 0.002}}) {
        Vec2 gr = g.regular_grad(p.first, p.second);
        const double fd1 = (g.regular(p.first + h, p.second) - g.regular(p.first - h, p.second)) / (2 * h);
        const double fd2 = (g.regular(p.first, p.second + h) - g.regular(p.first, p.second - h)) / (2 * h);
        CHECK(std::fabs(gr.x - fd1) < 1e-8);
        CHECK(std::fabs(gr.y - fd2) < 1e-8);
    }
    Vec2 gp = g.periodic_grad(0.11, -0.07);
    const double fd1 = (g.periodic(0.11 + h, -0.07) - g.periodic(0.11 - h, -0.07)) / (2 * h);
    CHECK(std::fabs(gp.x - fd1) < 1e-7);
}

TEST_CASE("Laplacian of the regular part is 1 near the origin") {
    TorusGreen g(0.02);
    const double h = 1e-4;
    const double x = 0.03, y = -0.02;
    const double lap = (g.regular(x + h, y) + g.regular(x - h, y) + g.regular(x, y + h) +
                        g.regular(x, y - h) - 4.0 * g.regular(x, y)) /
                       (h * h);
    CHECK(std::fabs(lap - 1.0) < 1e-5);
}

TEST_CASE("pointwise kernel matches the spectral convolution") {
    // G*f evaluated off-lattice by direct midpoint quadrature with the
    // Ewald kernel vs the spectral coefficient route.
    const int n = 64;
    TorusGreen green(0.02);
    auto ffun = [](double x1, double x2) {
        return std::sin(2.0 * kPi * x1) + std::cos(4.0 * kPi * x2) * std::sin(2.0 * kPi * x1);
    };
    ScalarField f = from_real(sample_function(n, ffun));
    ScalarField gf = green_convolve(f);
    RealField gfr = to_real(gf);

    FourierGrid grid(n);
    const double shift = 0.5 / n;  // keep targets off the source lattice
    double worst = 0.0;
    for (int t = 0; t < 12; ++t) {
        const int i1 = (7 * t + 3) % n, i2 = (11 * t + 5) % n;
        const double x1 = grid.coord(i1) + shift, x2 = grid.coord(i2) + shift;
        double quad = 0.0;
        for (int j1 = 0; j1 < n; ++j1) {
            for (int j2 = 0; j2 < n; ++j2) {
                quad += green.periodic(x1 - grid.coord(j1), x2 - grid.coord(j2)) *
                        ffun(grid.coord(j1), grid.coord(j2));
            }
        }
        quad /= double(n) * n;
        // spectral value at the shifted point, summed directly
        double spectral = 0.0;
        for (int k1 = -n / 2 + 1; k1 < n / 2; ++k1) {
            for (int k2 = -n / 2 + 1; k2 < n / 2; ++k2) {
                const cplx c = gf.at(grid.bin(k1), grid.bin(k2));
                spectral += (c * std::exp(cplx{0.0, 2.0 * kPi * (k1 * x1 + k2 * x2)})).real();
            }
        }
        worst = std::max(worst, std::fabs(quad - spectral));
    }
    const double scale = linf_norm(gfr);
    CHECK(worst < 1e-3 * scale);
}
