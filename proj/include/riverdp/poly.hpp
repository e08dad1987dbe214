// Real roots of low-degree polynomials.
#ifndef RIVERDP_POLY_HPP
#define RIVERDP_POLY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

namespace riverdp {

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 = 0, with degree reduction when
// leading coefficients vanish relative to the coefficient scale.
inline std::vector<double> solve_cubic_real(double c3, double c2, double c1,
                                            double c0) {
    std::vector<double> roots;
    const double scale =
        std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (scale == 0.0) return roots;
    const double tol = 1e-14 * scale;

    if (std::abs(c3) <= tol) {
        if (std::abs(c2) <= tol) {
            if (std::abs(c1) <= tol) return roots;
            roots.push_back(-c0 / c1);
            return roots;
        }
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc < 0.0) return roots;
        const double sq = std::sqrt(disc);
        // Stable quadratic formula via the larger-magnitude root.
        const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
        roots.push_back(q / c2);
        if (q != 0.0) roots.push_back(c0 / q);
        else roots.push_back(0.0);
        return roots;
    }

    const double a = c2 / c3;
    const double b = c1 / c3;
    const double c = c0 / c3;
    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    const double r2 = r * r;
    const double q3 = q * q * q;
    if (r2 < q3) {
        const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
        const double m = -2.0 * std::sqrt(q);
        roots.push_back(m * std::cos(theta / 3.0) - a / 3.0);
        roots.push_back(m * std::cos((theta + 2.0 * M_PI) / 3.0) - a / 3.0);
        roots.push_back(m * std::cos((theta - 2.0 * M_PI) / 3.0) - a / 3.0);
    } else {
        const double s = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r2 - q3)), r);
        const double t = (s == 0.0) ? 0.0 : q / s;
        roots.push_back(s + t - a / 3.0);
    }
    return roots;
}

} // namespace riverdp

#endif
