#include "ptlab/torus_green.hpp"

#include <cmath>
#include <stdexcept>

namespace ptlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr int kMaxCut = 64;

struct AxisTables {
    // cos/sin(2 pi k a) for k = 0..kc, built once per evaluation point.
    double c[kMaxCut + 1], s[kMaxCut + 1];

    AxisTables(double a, int kc) {
        const double cs = std::cos(kTwoPi * a), sn = std::sin(kTwoPi * a);
        c[0] = 1.0;
        s[0] = 0.0;
        for (int k = 1; k <= kc; ++k) {
            c[k] = c[k - 1] * cs - s[k - 1] * sn;
            s[k] = s[k - 1] * cs + c[k - 1] * sn;
        }
    }
};
}  // namespace

double exp_int_e1(double x) {
    if (x <= 0.0) throw std::invalid_argument("exp_int_e1: need x > 0");
    if (x > 700.0) return 0.0;
    return -std::expint(-x);
}

double e1_plus_log(double x) {
    if (x < 0.0) throw std::invalid_argument("e1_plus_log: need x >= 0");
    if (x >= 1.0) return exp_int_e1(x) + std::log(x);
    double term = 1.0, sum = 0.0;
    for (int j = 1; j < 40; ++j) {
        term *= -x / j;
        const double add = -term / j;  // (-1)^(j+1) x^j / (j j!)
        sum += add;
        if (std::fabs(add) < 1e-18) break;
    }
    return -kEulerGamma + sum;
}

TorusGreen::TorusGreen(double tau) : tau_(tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("TorusGreen: need tau > 0");
    kc_ = int(std::ceil(std::sqrt(45.0 / (4.0 * kPi * kPi * tau)))) + 2;
    if (kc_ > kMaxCut) throw std::invalid_argument("TorusGreen: tau too small");
    images_ = int(std::ceil(std::sqrt(45.0 * 4.0 * tau))) + 1;
}

double TorusGreen::periodic(double a1, double a2) const {
    AxisTables t1(a1, kc_), t2(a2, kc_);
    double spectral = 0.0;
    for (int k1 = -kc_; k1 <= kc_; ++k1) {
        const double c1 = t1.c[std::abs(k1)];
        const double s1 = (k1 >= 0) ? t1.s[k1] : -t1.s[-k1];
        for (int k2 = -kc_; k2 <= kc_; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double c2 = t2.c[std::abs(k2)];
            const double s2 = (k2 >= 0) ? t2.s[k2] : -t2.s[-k2];
            const double ksq = double(k1) * k1 + double(k2) * k2;
            spectral += std::exp(-4.0 * kPi * kPi * ksq * tau_) * (c1 * c2 - s1 * s2) /
                        (4.0 * kPi * kPi * ksq);
        }
    }
    double real_sum = 0.0;
    for (int m1 = -images_; m1 <= images_; ++m1) {
        for (int m2 = -images_; m2 <= images_; ++m2) {
            const double d1 = a1 - m1, d2 = a2 - m2;
            const double rsq = d1 * d1 + d2 * d2;
            if (rsq == 0.0) throw std::invalid_argument("TorusGreen::periodic: singular point");
            real_sum += exp_int_e1(rsq / (4.0 * tau_));
        }
    }
    return spectral + real_sum / (4.0 * kPi) - tau_;
}

Vec2 TorusGreen::periodic_grad(double a1, double a2) const {
    Vec2 g = regular_grad(a1, a2);
    // grad of -log|a|/(2 pi) restores the free-space singularity
    const double rsq = a1 * a1 + a2 * a2;
    g.x -= a1 / (kTwoPi * rsq);
    g.y -= a2 / (kTwoPi * rsq);
    return g;
}

double TorusGreen::regular(double a1, double a2) const {
    AxisTables t1(a1, kc_), t2(a2, kc_);
    double spectral = 0.0;
    for (int k1 = -kc_; k1 <= kc_; ++k1) {
        const double c1 = t1.c[std::abs(k1)];
        const double s1 = (k1 >= 0) ? t1.s[k1] : -t1.s[-k1];
        for (int k2 = -kc_; k2 <= kc_; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double c2 = t2.c[std::abs(k2)];
            const double s2 = (k2 >= 0) ? t2.s[k2] : -t2.s[-k2];
            const double ksq = double(k1) * k1 + double(k2) * k2;
            spectral += std::exp(-4.0 * kPi * kPi * ksq * tau_) * (c1 * c2 - s1 * s2) /
                        (4.0 * kPi * kPi * ksq);
        }
    }
    // The m = 0 image pairs with the removed logarithm:
    //   E1(x)/(4 pi) + log|a|/(2 pi) = (e1_plus_log(x) + log(4 tau)) / (4 pi)
    // at x = |a|^2/(4 tau), analytic through a = 0.
    const double x0 = (a1 * a1 + a2 * a2) / (4.0 * tau_);
    double real_sum = e1_plus_log(x0) + std::log(4.0 * tau_);
    for (int m1 = -images_; m1 <= images_; ++m1) {
        for (int m2 = -images_; m2 <= images_; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            const double d1 = a1 - m1, d2 = a2 - m2;
            real_sum += exp_int_e1((d1 * d1 + d2 * d2) / (4.0 * tau_));
        }
    }
    return spectral + real_sum / (4.0 * kPi) - tau_;
}

Vec2 TorusGreen::regular_grad(double a1, double a2) const {
    AxisTables t1(a1, kc_), t2(a2, kc_);
    Vec2 g{0.0, 0.0};
    for (int k1 = -kc_; k1 <= kc_; ++k1) {
        const double c1 = t1.c[std::abs(k1)];
        const double s1 = (k1 >= 0) ? t1.s[k1] : -t1.s[-k1];
        for (int k2 = -kc_; k2 <= kc_; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double c2 = t2.c[std::abs(k2)];
            const double s2 = (k2 >= 0) ? t2.s[k2] : -t2.s[-k2];
            const double ksq = double(k1) * k1 + double(k2) * k2;
            const double sin_ka = s1 * c2 + c1 * s2;
            const double common =
                -kTwoPi * std::exp(-4.0 * kPi * kPi * ksq * tau_) * sin_ka / (4.0 * kPi * kPi * ksq);
            g.x += common * k1;
            g.y += common * k2;
        }
    }
    for (int m1 = -images_; m1 <= images_; ++m1) {
        for (int m2 = -images_; m2 <= images_; ++m2) {
            const double d1 = a1 - m1, d2 = a2 - m2;
            const double rsq = d1 * d1 + d2 * d2;
            if (m1 == 0 && m2 == 0) {
                // combined with the log gradient: a (-expm1(-x)) / (2 pi |a|^2)
                const double x = rsq / (4.0 * tau_);
                const double factor = (x < 1e-12) ? 1.0 / (8.0 * kPi * tau_)
                                                  : -std::expm1(-x) / (kTwoPi * rsq);
                g.x += d1 * factor;
                g.y += d2 * factor;
            } else {
                const double factor = -std::exp(-rsq / (4.0 * tau_)) / (kTwoPi * rsq);
                g.x += d1 * factor;
                g.y += d2 * factor;
            }
        }
    }
    return g;
}

Vec2 TorusGreen::kernel(double a1, double a2) const {
    Vec2 g = periodic_grad(a1, a2);
    return Vec2{g.y, -g.x};
}

}  // namespace ptlab
