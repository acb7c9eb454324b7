#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

namespace ptlab {

using cplx = std::complex<double>;

// Uniform n-by-n collocation grid on the unit torus, identified with the
// square [-1/2, 1/2)^2.  Basis functions are e_k(x) = exp(2*pi*i k.x) with
// integer wavevectors k in {-n/2, ..., n/2-1}^2; storage is row-major over
// the FFT index (i1, i2) with i = i1*n + i2.
struct FourierGrid {
    int n = 0;

    explicit FourierGrid(int n_) : n(n_) {
        assert(n > 0 && n % 2 == 0);
    }

    std::size_t size() const { return std::size_t(n) * n; }
    std::size_t idx(int i1, int i2) const { return std::size_t(i1) * n + i2; }

    // FFT storage index -> signed wavenumber.
    int wave(int i) const { return (i < n / 2) ? i : i - n; }
    // Signed wavenumber -> FFT storage index.
    int bin(int k) const { return (k >= 0) ? k : k + n; }

    // Collocation coordinate of index i, wrapped to [-1/2, 1/2).
    double coord(int i) const {
        return (i < n / 2) ? double(i) / n : double(i) / n - 1.0;
    }
};

// Scalar field stored as Fourier coefficients under the convention
// f_hat(k) = integral of f(x) e_{-k}(x) dx.  Real-space views are produced
// on demand (see spectral_ops.hpp / fft.hpp).
struct ScalarField {
    int n = 0;
    std::vector<cplx> c;

    ScalarField() = default;
    explicit ScalarField(int n_) : n(n_), c(std::size_t(n_) * n_, cplx{0.0, 0.0}) {}

    FourierGrid grid() const { return FourierGrid(n); }
    cplx& at(int i1, int i2) { return c[std::size_t(i1) * n + i2]; }
    const cplx& at(int i1, int i2) const { return c[std::size_t(i1) * n + i2]; }
};

struct RealField {
    int n = 0;
    std::vector<double> v;

    RealField() = default;
    explicit RealField(int n_) : n(n_), v(std::size_t(n_) * n_, 0.0) {}

    double& at(int i1, int i2) { return v[std::size_t(i1) * n + i2]; }
    const double& at(int i1, int i2) const { return v[std::size_t(i1) * n + i2]; }
};

struct VectorField2 {
    ScalarField u1, u2;

    VectorField2() = default;
    explicit VectorField2(int n) : u1(n), u2(n) {}
    int size_n() const { return u1.n; }
};

struct RealVectorField2 {
    RealField u1, u2;

    RealVectorField2() = default;
    explicit RealVectorField2(int n) : u1(n), u2(n) {}
};

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Dense 2x2 matrix, row-major.
struct Mat2 {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    static Mat2 identity(double s = 1.0) {
        Mat2 m;
        m.a[0][0] = m.a[1][1] = s;
        return m;
    }
    // s * [[0, 1], [-1, 0]]
    static Mat2 rotation(double s) {
        Mat2 m;
        m.a[0][1] = s;
        m.a[1][0] = -s;
        return m;
    }
    double norm() const {
        return std::sqrt(a[0][0] * a[0][0] + a[0][1] * a[0][1] +
                         a[1][0] * a[1][0] + a[1][1] * a[1][1]);
    }
};

}  // namespace ptlab
