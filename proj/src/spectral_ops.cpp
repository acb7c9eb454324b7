#include "ptlab/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ptlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<cplx>& scratch_for(int n) {
    thread_local std::vector<cplx> buf;
    buf.resize(std::size_t(n) * n);
    return buf;
}
}  // namespace

RealField to_real(const ScalarField& f) {
    auto& buf = scratch_for(f.n);
    fft_for(f.n).backward(f.c.data(), buf.data());
    RealField r(f.n);
    const std::size_t m = r.v.size();
    for (std::size_t i = 0; i < m; ++i) r.v[i] = buf[i].real();
    return r;
}

ScalarField from_real(const RealField& r) {
    auto& buf = scratch_for(r.n);
    const std::size_t m = r.v.size();
    for (std::size_t i = 0; i < m; ++i) buf[i] = cplx{r.v[i], 0.0};
    ScalarField f(r.n);
    fft_for(r.n).forward(buf.data(), f.c.data());
    return f;
}

double field_mean(const ScalarField& f) { return f.c[0].real(); }

void pin_zero_mean(ScalarField& f) { f.c[0] = cplx{0.0, 0.0}; }

double l2_norm_sq(const ScalarField& f) {
    double s = 0.0;
    for (const cplx& z : f.c) s += std::norm(z);
    return s;
}

double l2_inner(const ScalarField& f, const ScalarField& g) {
    double s = 0.0;
    const std::size_t m = f.c.size();
    for (std::size_t i = 0; i < m; ++i) s += (f.c[i] * std::conj(g.c[i])).real();
    return s;
}

double linf_norm(const RealField& r) {
    double s = 0.0;
    for (double x : r.v) s = std::max(s, std::fabs(x));
    return s;
}

ScalarField derivative(const ScalarField& f, int axis) {
    const int n = f.n;
    FourierGrid g(n);
    ScalarField d(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k = (axis == 0) ? k1 : g.wave(i2);
            d.at(i1, i2) = f.at(i1, i2) * cplx{0.0, kTwoPi * k};
        }
    }
    return d;
}

VectorField2 apply_gradient(const ScalarField& f, bool rotated) {
    VectorField2 out(f.n);
    if (!rotated) {
        out.u1 = derivative(f, 0);
        out.u2 = derivative(f, 1);
    } else {
        out.u1 = derivative(f, 1);
        out.u2 = derivative(f, 0);
        for (cplx& z : out.u2.c) z = -z;
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const int n = f.n;
    FourierGrid g(n);
    ScalarField d(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            d.at(i1, i2) = f.at(i1, i2) * (-kTwoPi * kTwoPi * (k1 * k1 + k2 * k2));
        }
    }
    return d;
}

ScalarField divergence(const VectorField2& u) {
    ScalarField d = derivative(u.u1, 0);
    ScalarField d2 = derivative(u.u2, 1);
    for (std::size_t i = 0; i < d.c.size(); ++i) d.c[i] += d2.c[i];
    return d;
}

ScalarField green_convolve(const ScalarField& f) {
    const double scale = std::sqrt(l2_norm_sq(f));
    if (std::fabs(f.c[0].real()) > 1e-12 * std::max(1.0, scale) ||
        std::fabs(f.c[0].imag()) > 1e-12 * std::max(1.0, scale)) {
        throw std::invalid_argument("green_convolve: input must have zero mean");
    }
    const int n = f.n;
    FourierGrid g(n);
    ScalarField out(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            const int k_sq = k1 * k1 + k2 * k2;
            out.at(i1, i2) = (k_sq == 0)
                                 ? cplx{0.0, 0.0}
                                 : f.at(i1, i2) / (kTwoPi * kTwoPi * k_sq);
        }
    }
    return out;
}

VectorField2 biot_savart(const ScalarField& omega3) {
    const double scale = std::sqrt(l2_norm_sq(omega3));
    if (std::abs(omega3.c[0]) > 1e-12 * std::max(1.0, scale)) {
        throw std::invalid_argument("biot_savart: input must have zero mean");
    }
    const int n = omega3.n;
    FourierGrid g(n);
    VectorField2 v(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            const int k_sq = k1 * k1 + k2 * k2;
            if (k_sq == 0) continue;
            // v_hat = 2 pi i (-k2, k1) w_hat / (4 pi^2 |k|^2), which makes
            // d2 v1 - d1 v2 = omega3 and k.v_hat = 0.
            const cplx w = omega3.at(i1, i2) * cplx{0.0, 1.0} / (kTwoPi * k_sq);
            v.u1.at(i1, i2) = w * double(-k2);
            v.u2.at(i1, i2) = w * double(k1);
        }
    }
    return v;
}

void dealias(ScalarField& f) {
    const int n = f.n;
    const int cut = n / 3;
    FourierGrid g(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int a1 = std::abs(g.wave(i1));
        for (int i2 = 0; i2 < n; ++i2) {
            if (std::max(a1, std::abs(g.wave(i2))) > cut) f.at(i1, i2) = cplx{0.0, 0.0};
        }
    }
}

ScalarField dealiased(const ScalarField& f) {
    ScalarField g = f;
    dealias(g);
    return g;
}

ScalarField multiply_dealias(const ScalarField& f, const ScalarField& g) {
    RealField rf = to_real(f);
    RealField rg = to_real(g);
    for (std::size_t i = 0; i < rf.v.size(); ++i) rf.v[i] *= rg.v[i];
    ScalarField out = from_real(rf);
    dealias(out);
    return out;
}

}  // namespace ptlab
