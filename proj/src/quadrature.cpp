#include "ptlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ptlab {

QuadRule gauss_legendre(int m, double a, double b) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: need m >= 1");
    QuadRule r;
    r.x.resize(m);
    r.w.resize(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Newton iteration on P_m from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = mid - half * x;
        r.w[i] = half * w;
        r.x[m - 1 - i] = mid + half * x;
        r.w[m - 1 - i] = half * w;
    }
    return r;
}

QuadRule composite_gauss(int m_per_panel, const std::vector<double>& breaks) {
    if (breaks.size() < 2) throw std::invalid_argument("composite_gauss: need >= 2 breakpoints");
    QuadRule r;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        QuadRule panel = gauss_legendre(m_per_panel, breaks[p], breaks[p + 1]);
        r.x.insert(r.x.end(), panel.x.begin(), panel.x.end());
        r.w.insert(r.w.end(), panel.w.begin(), panel.w.end());
    }
    return r;
}

std::vector<double> graded_breaks(double a, double b, int panels, double q) {
    if (panels < 1 || q <= 0.0) throw std::invalid_argument("graded_breaks: bad arguments");
    std::vector<double> t(panels + 1);
    t[0] = a;
    const double c = (q == 1.0) ? (b - a) / panels
                                : (b - a) * (1.0 - q) / (1.0 - std::pow(q, panels));
    double acc = a;
    for (int j = 1; j <= panels; ++j) {
        acc += c * std::pow(q, panels - j);
        t[j] = acc;
    }
    t[panels] = b;
    return t;
}

}  // namespace ptlab
