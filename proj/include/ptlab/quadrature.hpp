#pragma once

#include <vector>

namespace ptlab {

// Nodes and weights for 1d quadrature on some interval.
struct QuadRule {
    std::vector<double> x, w;

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
        return s;
    }
};

// Gauss-Legendre rule with m nodes on [a, b]; exact for polynomials of
// degree 2m-1.
QuadRule gauss_legendre(int m, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre over the panels defined by consecutive
// breakpoints.
QuadRule composite_gauss(int m_per_panel, const std::vector<double>& breaks);

// Breakpoints of a geometric grading from a toward b: the panel adjacent
// to a has length (b-a)*(1-q)/(1-q^panels) * q^(panels-1) ... the panel at
// b is the largest.  Useful near integrable endpoint singularities.
std::vector<double> graded_breaks(double a, double b, int panels, double q);

}  // namespace ptlab
