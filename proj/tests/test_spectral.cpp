#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ptlab/spectral_ops.hpp"

using namespace ptlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField random_zero_mean(int n, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealField r(n);
    for (double& x : r.v) x = u(eng);
    ScalarField f = from_real(r);
    pin_zero_mean(f);
    return f;
}

double rel_l2_err(const ScalarField& got, const ScalarField& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.c.size(); ++i) {
        num += std::norm(got.c[i] - want.c[i]);
        den += std::norm(want.c[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("fft round trip and Parseval") {
    const int n = 64;
    ScalarField f = random_zero_mean(n, 11);
    RealField r = to_real(f);
    ScalarField g = from_real(r);
    for (std::size_t i = 0; i < f.c.size(); ++i) {
        CHECK(std::abs(f.c[i] - g.c[i]) < 1e-12);
    }

    // sum over grid of f^2 / n^2 equals sum over modes of |f_hat|^2
    double quad = 0.0;
    for (double x : r.v) quad += x * x;
    quad /= double(n) * n;
    CHECK(std::fabs(quad - l2_norm_sq(f)) < 1e-12 * quad);
}

TEST_CASE("real input gives Hermitian coefficients") {
    const int n = 32;
    ScalarField f = random_zero_mean(n, 5);
    FourierGrid g(n);
    for (int k1 = -15; k1 <= 15; ++k1) {
        for (int k2 = -15; k2 <= 15; ++k2) {
            cplx a = f.at(g.bin(k1), g.bin(k2));
            cplx b = f.at(g.bin(-k1), g.bin(-k2));
            CHECK(std::abs(a - std::conj(b)) < 1e-14);
        }
    }
}

TEST_CASE("single-mode derivatives") {
    const int n = 32;
    ScalarField f = from_real(sample_function(
        n, [](double, double x2) { return std::cos(2.0 * kPi * x2); }));

    ScalarField want = from_real(sample_function(
        n, [](double, double x2) { return -2.0 * kPi * std::sin(2.0 * kPi * x2); }));
    ScalarField d2 = derivative(f, 1);
    for (std::size_t i = 0; i < d2.c.size(); ++i) CHECK(std::abs(d2.c[i] - want.c[i]) < 1e-12);

    // rotated gradient is (d2 f, -d1 f)
    VectorField2 rg = apply_gradient(f, true);
    for (std::size_t i = 0; i < rg.u1.c.size(); ++i) {
        CHECK(std::abs(rg.u1.c[i] - want.c[i]) < 1e-12);
        CHECK(std::abs(rg.u2.c[i]) < 1e-14);
    }
}

TEST_CASE("spectral gradient matches finite differences at n=256") {
    const int n = 256;
    auto h = [](double x1, double x2) {
        return std::sin(2.0 * kPi * x1) * std::cos(2.0 * kPi * x2) +
               std::exp(std::sin(2.0 * kPi * x2));
    };
    RealField r = sample_function(n, h);
    VectorField2 grad = apply_gradient(from_real(r));

    // fourth-order central differences as the independent check
    auto wrap = [n](int i) { return (i % n + n) % n; };
    const double hs = 1.0 / n;
    for (int axis = 0; axis < 2; ++axis) {
        RealField fd(n);
        for (int i1 = 0; i1 < n; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
                auto v = [&](int s) {
                    return (axis == 0) ? r.at(wrap(i1 + s), i2) : r.at(i1, wrap(i2 + s));
                };
                fd.at(i1, i2) = (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * hs);
            }
        }
        const ScalarField& sp = (axis == 0) ? grad.u1 : grad.u2;
        CHECK(rel_l2_err(from_real(fd), sp) < 1e-6);
    }
}

TEST_CASE("Green convolution") {
    const int n = 32;
    // sin(2 pi x1) is an eigenfunction with eigenvalue 1/(4 pi^2)
    ScalarField f = from_real(sample_function(
        n, [](double x1, double) { return std::sin(2.0 * kPi * x1); }));
    ScalarField gf = green_convolve(f);
    for (std::size_t i = 0; i < gf.c.size(); ++i) {
        CHECK(std::abs(gf.c[i] - f.c[i] / (4.0 * kPi * kPi)) < 1e-14);
    }

    ScalarField w = random_zero_mean(n, 17);
    ScalarField back = laplacian(green_convolve(w));
    for (cplx& z : back.c) z = -z;
    CHECK(rel_l2_err(back, w) < 1e-12);

    ScalarField bad = w;
    bad.c[0] = cplx{0.3, 0.0};
    CHECK_THROWS_AS(green_convolve(bad), std::invalid_argument);
}

TEST_CASE("Biot-Savart single mode") {
    const int n = 32;
    ScalarField omega = from_real(sample_function(
        n, [](double x1, double) { return std::sin(2.0 * kPi * x1); }));
    VectorField2 v = biot_savart(omega);
    ScalarField want = from_real(sample_function(
        n, [](double x1, double) { return std::cos(2.0 * kPi * x1) / (2.0 * kPi); }));
    for (std::size_t i = 0; i < v.u1.c.size(); ++i) {
        CHECK(std::abs(v.u1.c[i]) < 1e-14);
        CHECK(std::abs(v.u2.c[i] - want.c[i]) < 1e-14);
    }
}

TEST_CASE("Biot-Savart inverts the curl and is divergence free") {
    const int n = 64;
    ScalarField omega = random_zero_mean(n, 23);
    VectorField2 v = biot_savart(omega);

    ScalarField curl = derivative(v.u1, 1);
    ScalarField d1v2 = derivative(v.u2, 0);
    for (std::size_t i = 0; i < curl.c.size(); ++i) curl.c[i] -= d1v2.c[i];
    CHECK(rel_l2_err(curl, omega) < 1e-12);

    ScalarField div = divergence(v);
    CHECK(std::sqrt(l2_norm_sq(div)) < 1e-12 * std::sqrt(l2_norm_sq(omega)));
}

TEST_CASE("dealias keeps the 2/3 band and nothing else") {
    const int n = 32;  // cut at max(|k1|,|k2|) = 10
    FourierGrid g(n);
    ScalarField f(n);
    f.at(g.bin(10), g.bin(0)) = cplx{1.0, 0.0};
    f.at(g.bin(11), g.bin(0)) = cplx{1.0, 0.0};
    f.at(g.bin(0), g.bin(-11)) = cplx{1.0, 0.0};
    f.at(g.bin(9), g.bin(10)) = cplx{1.0, 0.0};
    dealias(f);
    CHECK(f.at(g.bin(10), g.bin(0)) == cplx{1.0, 0.0});
    CHECK(f.at(g.bin(11), g.bin(0)) == cplx{0.0, 0.0});
    CHECK(f.at(g.bin(0), g.bin(-11)) == cplx{0.0, 0.0});
    CHECK(f.at(g.bin(9), g.bin(10)) == cplx{1.0, 0.0});
}

TEST_CASE("dealiased product matches the direct convolution sum") {
    const int n = 32;
    const int cut = n / 3;
    ScalarField f = dealiased(random_zero_mean(n, 31));
    ScalarField g = dealiased(random_zero_mean(n, 37));
    ScalarField prod = multiply_dealias(f, g);

    FourierGrid gr(n);
    double worst = 0.0;
    for (int k1 = -cut; k1 <= cut; ++k1) {
        for (int k2 = -cut; k2 <= cut; ++k2) {
            cplx sum{0.0, 0.0};
            for (int m1 = -cut; m1 <= cut; ++m1) {
                for (int m2 = -cut; m2 <= cut; ++m2) {
                    const int r1 = k1 - m1, r2 = k2 - m2;
                    if (std::abs(r1) > cut || std::abs(r2) > cut) continue;
                    sum += f.at(gr.bin(m1), gr.bin(m2)) * g.at(gr.bin(r1), gr.bin(r2));
                }
            }
            worst = std::max(worst, std::abs(prod.at(gr.bin(k1), gr.bin(k2)) - sum));
        }
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("mean handling") {
    const int n = 16;
    RealField r = sample_function(n, [](double x1, double x2) {
        return 0.7 + std::sin(2.0 * kPi * x1) + std::cos(4.0 * kPi * x2);
    });
    ScalarField f = from_real(r);
    CHECK(field_mean(f) == doctest::Approx(0.7).epsilon(1e-12));
    pin_zero_mean(f);
    CHECK(field_mean(f) == 0.0);
}
