#include "ptlab/profile.hpp"

#include <cmath>
#include <stdexcept>

#include "ptlab/quadrature.hpp"
#include "ptlab/spectral_ops.hpp"

namespace ptlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double shape(double u) {  // u = rho / radius
    if (u >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}
}  // namespace

double RadialBump::operator()(double rho) const {
    return amplitude * shape(rho / radius);
}

double RadialBump::value(double x1, double x2) const {
    return (*this)(std::sqrt(x1 * x1 + x2 * x2));
}

double RadialBump::mass_within(double rho) const {
    const double top = std::min(rho, radius);
    if (top <= 0.0) return 0.0;
    QuadRule q = gauss_legendre(64, 0.0, top);
    return q.integrate([this](double s) { return kTwoPi * (*this)(s) * s; });
}

double RadialBump::fourier(double kmag) const {
    // Resolve the oscillation of J0(2 pi kmag s) across the support.
    const int panels = 2 + int(std::ceil(kmag * radius));
    QuadRule q = composite_gauss(24, graded_breaks(0.0, radius, panels, 1.0));
    return q.integrate([&](double s) {
        return kTwoPi * (*this)(s) * std::cyl_bessel_j(0, kTwoPi * kmag * s) * s;
    });
}

RadialBump make_bump(double radius) {
    if (radius <= 0.0) throw std::invalid_argument("make_bump: radius must be positive");
    RadialBump b;
    b.radius = radius;
    b.amplitude = 1.0;
    b.amplitude = 1.0 / b.mass_within(radius);
    return b;
}

ScalarField sample_bump(const RadialBump& b, double ell, int n) {
    if (!(ell > 0.0) || ell * b.radius >= 0.5) {
        throw std::invalid_argument("sample_bump: scaled support must fit in the cell");
    }
    const double inv_area = 1.0 / (ell * ell);
    RealField r = sample_function(n, [&](double x1, double x2) {
        return inv_area * b.value(x1 / ell, x2 / ell);
    });
    return from_real(r);
}

}  // namespace ptlab
