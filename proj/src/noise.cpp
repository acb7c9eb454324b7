#include "ptlab/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "ptlab/fft.hpp"
#include "ptlab/quadrature.hpp"
#include "ptlab/spectral_ops.hpp"
#include "ptlab/torus_green.hpp"

namespace ptlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void check_resolution(double ell, int n) {
    if (n * ell < 8.0) {
        throw std::invalid_argument("vortex core under-resolved: need n*ell >= 8");
    }
}

bool nyquist(const FourierGrid& g, int i1, int i2) {
    return i1 == g.n / 2 || i2 == g.n / 2;
}

// sum over k != 0 of |theta_hat(k)|^2 / (4 pi^2 |k|^2) = ||K*theta||_{L2}^2
double green_energy(const ScalarField& theta_hat) {
    FourierGrid g(theta_hat.n);
    double s = 0.0;
    for (int i1 = 0; i1 < g.n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < g.n; ++i2) {
            const int k2 = g.wave(i2);
            if ((k1 == 0 && k2 == 0) || nyquist(g, i1, i2)) continue;
            const double ksq = double(k1) * k1 + double(k2) * k2;
            s += std::norm(theta_hat.at(i1, i2)) / (4.0 * kPi * kPi * ksq);
        }
    }
    return s;
}
}  // namespace

double calibrate_gamma(const RadialBump& theta, double ell, double kappa, int n) {
    check_resolution(ell, n);
    const double s = green_energy(sample_bump(theta, ell, n));
    return 2.0 * std::sqrt(kappa) / std::sqrt(s);
}

SpectralNoise build_spectral_noise(const NoiseSpec& spec, int n) {
    check_resolution(spec.ell, n);
    SpectralNoise sn;
    sn.n = n;
    sn.ell = spec.ell;
    sn.kappa = spec.kappa;

    const RadialBump theta = make_bump(spec.r_theta);
    const RadialBump chi = make_bump(spec.r_chi);
    const ScalarField theta_hat = sample_bump(theta, spec.ell, n);
    const ScalarField chi_hat = sample_bump(chi, spec.ell, n);

    sn.gamma = 2.0 * std::sqrt(spec.kappa) / std::sqrt(green_energy(theta_hat));
    sn.gamma3 = (spec.rule.kind == GammaRule::Kind::proportional)
                    ? spec.rule.q0 * sn.gamma
                    : std::pow(sn.gamma, 1.0 + spec.rule.p);

    sn.sigma_h_hat = VectorField2(n);
    sn.sigma3_hat = ScalarField(n);
    FourierGrid g(n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            if ((k1 == 0 && k2 == 0) || nyquist(g, i1, i2)) continue;
            const double ksq = double(k1) * k1 + double(k2) * k2;
            const cplx bh = sn.gamma * theta_hat.at(i1, i2) * cplx{0.0, 1.0} / (kTwoPi * ksq);
            sn.sigma_h_hat.u1.at(i1, i2) = bh * double(-k2);
            sn.sigma_h_hat.u2.at(i1, i2) = bh * double(k1);
            sn.sigma3_hat.at(i1, i2) =
                sn.gamma3 * chi_hat.at(i1, i2) / (4.0 * kPi * kPi * ksq);
        }
    }
    return sn;
}

CovarianceTables covariance_tables(const SpectralNoise& sn) {
    const int n = sn.n;
    FourierGrid g(n);
    CovarianceTables ct;
    ct.n = n;

    const ScalarField* comp[3] = {&sn.sigma_h_hat.u1, &sn.sigma_h_hat.u2, &sn.sigma3_hat};

    ScalarField qhat(n);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (std::size_t i = 0; i < qhat.c.size(); ++i) {
                qhat.c[i] = comp[a]->c[i] * std::conj(comp[b]->c[i]);
            }
            ct.q[a][b] = to_real(qhat);
        }
    }

    for (int i1 = 0; i1 < n; ++i1) {
        const int k1 = g.wave(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const int k2 = g.wave(i2);
            const cplx s1 = sn.sigma_h_hat.u1.at(i1, i2);
            const cplx s2 = sn.sigma_h_hat.u2.at(i1, i2);
            const cplx s3 = sn.sigma3_hat.at(i1, i2);

            ct.q_h0.a[0][0] += std::norm(s1);
            ct.q_h0.a[0][1] += (s1 * std::conj(s2)).real();
            ct.q_h0.a[1][0] += (s2 * std::conj(s1)).real();
            ct.q_h0.a[1][1] += std::norm(s2);

            const double kk[2] = {double(k1), double(k2)};
            for (int j = 0; j < 2; ++j) {
                ct.grad_qh3_0.a[0][j] += (cplx{0.0, kTwoPi * kk[j]} * s1 * std::conj(s3)).real();
                ct.grad_qh3_0.a[1][j] += (cplx{0.0, kTwoPi * kk[j]} * s2 * std::conj(s3)).real();
            }
            const double n3 = std::norm(s3);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    ct.hess_q3_0.a[i][j] -= 4.0 * kPi * kPi * kk[i] * kk[j] * n3;
                }
            }
            ct.opnorm_qh = std::max(ct.opnorm_qh, std::norm(s1) + std::norm(s2));
            ct.opnorm_q3 = std::max(ct.opnorm_q3, n3);
        }
    }
    return ct;
}

StructureChecks structure_checks(const SpectralNoise& sn, const CovarianceTables& ct) {
    StructureChecks out;
    out.trace_error = std::fabs(ct.q_h0.a[0][0] + ct.q_h0.a[1][1] - 4.0 * sn.kappa);
    const int n = ct.n;
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const int j1 = (n - i1) % n, j2 = (n - i2) % n;
            out.worst_even = std::max({out.worst_even,
                                       std::fabs(ct.q[0][0].at(i1, i2) - ct.q[0][0].at(j1, j2)),
                                       std::fabs(ct.q[2][2].at(i1, i2) - ct.q[2][2].at(j1, j2))});
            out.worst_odd = std::max(out.worst_odd,
                                     std::fabs(ct.q[0][2].at(i1, i2) + ct.q[0][2].at(j1, j2)));
            out.worst_transpose = std::max(out.worst_transpose,
                                           std::fabs(ct.q[0][1].at(j1, j2) - ct.q[1][0].at(i1, i2)));
        }
    }
    const ScalarField* comp[3] = {&sn.sigma_h_hat.u1, &sn.sigma_h_hat.u2, &sn.sigma3_hat};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            ScalarField back = from_real(ct.q[a][b]);
            for (std::size_t i = 0; i < back.c.size(); ++i) {
                out.worst_factorization =
                    std::max(out.worst_factorization,
                             std::abs(back.c[i] - comp[a]->c[i] * std::conj(comp[b]->c[i])));
            }
        }
    }
    return out;
}

void sample_increment(const SpectralNoise& sn, double dt, GaussianStream& gs,
                      VectorField2& dw_h, ScalarField& dw_3) {
    const int n = sn.n;
    if (dw_h.size_n() != n) dw_h = VectorField2(n);
    if (dw_3.n != n) dw_3 = ScalarField(n);
    for (auto* f : {&dw_h.u1, &dw_h.u2, &dw_3}) {
        std::fill(f->c.begin(), f->c.end(), cplx{0.0, 0.0});
    }

    FourierGrid g(n);
    const double root_dt = std::sqrt(dt);
    // fixed iteration order over the half lattice keeps replays bit-identical
    for (int k1 = 0; k1 < n / 2; ++k1) {
        for (int k2 = (k1 == 0) ? 1 : -n / 2 + 1; k2 < n / 2; ++k2) {
            const int ip1 = g.bin(k1), ip2 = g.bin(k2);
            const int im1 = g.bin(-k1), im2 = g.bin(-k2);
            auto [za, zb] = gs.normal_pair();
            const cplx xi = cplx{za, zb} * std::sqrt(0.5) * root_dt;
            const cplx a1 = sn.sigma_h_hat.u1.at(ip1, ip2) * xi;
            const cplx a2 = sn.sigma_h_hat.u2.at(ip1, ip2) * xi;
            const cplx a3 = sn.sigma3_hat.at(ip1, ip2) * xi;
            dw_h.u1.at(ip1, ip2) = a1;
            dw_h.u2.at(ip1, ip2) = a2;
            dw_3.at(ip1, ip2) = a3;
            dw_h.u1.at(im1, im2) = std::conj(a1);
            dw_h.u2.at(im1, im2) = std::conj(a2);
            dw_3.at(im1, im2) = std::conj(a3);
        }
    }
}

double biot_savart_kernel_l1() {
    static const double value = [] {
        TorusGreen green(0.02);
        double total = 0.0;
        // polar integration over the square cell, radial panels graded
        // toward the 1/|a| singularity (killed by the Jacobian)
        QuadRule theta_rule = composite_gauss(16, graded_breaks(0.0, kPi / 4.0, 4, 1.0));
        for (int oct = 0; oct < 8; ++oct) {
            for (std::size_t it = 0; it < theta_rule.x.size(); ++it) {
                const double th = oct * kPi / 4.0 + theta_rule.x[it];
                const double rmax =
                    0.5 / std::max(std::fabs(std::cos(th)), std::fabs(std::sin(th)));
                QuadRule r_rule = composite_gauss(12, graded_breaks(0.0, rmax, 10, 0.6));
                const double inner = r_rule.integrate([&](double r) {
                    Vec2 k = green.kernel(r * std::cos(th), r * std::sin(th));
                    return std::hypot(k.x, k.y) * r;
                });
                total += theta_rule.w[it] * inner;
            }
        }
        return total;
    }();
    return value;
}

std::vector<HypothesisRow> hypothesis_ladder(const NoiseSpec& base,
                                             const std::vector<double>& ells, int n_min) {
    std::vector<HypothesisRow> rows;
    rows.reserve(ells.size());
    for (double ell : ells) {
        int n = n_min;
        while (n * ell < 8.0) n *= 2;
        NoiseSpec spec = base;
        spec.ell = ell;
        SpectralNoise sn = build_spectral_noise(spec, n);
        CovarianceTables ct = covariance_tables(sn);
        HypothesisRow row;
        row.ell = ell;
        row.n = n;
        row.gamma = sn.gamma;
        row.gamma3 = sn.gamma3;
        row.q_h0 = ct.q_h0;
        row.grad_qh3_0 = ct.grad_qh3_0;
        row.opnorm_qh = ct.opnorm_qh;
        row.opnorm_q3 = ct.opnorm_q3;
        row.hess_q3_norm = ct.hess_q3_0.norm();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ptlab
