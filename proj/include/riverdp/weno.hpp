// WENO kernels: fifth-order upwind-biased first derivatives for
// Hamilton-Jacobi equations and third-order non-oscillatory interpolation
// for semi-Lagrangian foot points.
//
// Boundary handling extends the data by linearly extrapolated ghost nodes
// (3 per side for the derivatives, 2 for the interpolation), which keeps
// linear data exact up to the boundary.
#ifndef RIVERDP_WENO_HPP
#define RIVERDP_WENO_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "riverdp/errors.hpp"
#include "riverdp/grid.hpp"

namespace riverdp {

inline constexpr double kWenoEps = 1e-6;  // Jiang-Shu smoothness regularizer

namespace detail {

// Fifth-order WENO reconstruction of a point value at the right edge of the
// middle cell, from five consecutive cell averages v0..v4.
inline double weno5_edge(double v0, double v1, double v2, double v3, double v4) {
    const double p0 = (2.0 * v0 - 7.0 * v1 + 11.0 * v2) / 6.0;
    const double p1 = (-v1 + 5.0 * v2 + 2.0 * v3) / 6.0;
    const double p2 = (2.0 * v2 + 5.0 * v3 - v4) / 6.0;

    const double c1 = 13.0 / 12.0;
    const double b0 = c1 * (v0 - 2.0 * v1 + v2) * (v0 - 2.0 * v1 + v2) +
                      0.25 * (v0 - 4.0 * v1 + 3.0 * v2) * (v0 - 4.0 * v1 + 3.0 * v2);
    const double b1 = c1 * (v1 - 2.0 * v2 + v3) * (v1 - 2.0 * v2 + v3) +
                      0.25 * (v1 - v3) * (v1 - v3);
    const double b2 = c1 * (v2 - 2.0 * v3 + v4) * (v2 - 2.0 * v3 + v4) +
                      0.25 * (3.0 * v2 - 4.0 * v3 + v4) * (3.0 * v2 - 4.0 * v3 + v4);

    const double a0 = 0.1 / ((kWenoEps + b0) * (kWenoEps + b0));
    const double a1 = 0.6 / ((kWenoEps + b1) * (kWenoEps + b1));
    const double a2 = 0.3 / ((kWenoEps + b2) * (kWenoEps + b2));
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2);
}

// Fetch values[k] with 3 linearly extrapolated ghost nodes per side.
template <class V>
inline double fetch_ghost3(const V& values, long n, long k) {
    if (k < 0) return (1.0 - k) * values[0] + k * values[1];  // 2v0-v1, 3v0-2v1, ...
    if (k >= n) {
        const long m = k - (n - 1);
        return (1.0 + m) * values[n - 1] - m * values[n - 2];
    }
    return values[k];
}

// Left-biased derivative at node k (window k-3..k+2), spacing h.
template <class V>
inline double weno5_left_at(const V& values, long n, long k, double h) {
    double f[5];
    for (long m = 0; m < 5; ++m) {
        const long j = k - 3 + m;  // cell [x_j, x_{j+1}]
        f[m] = (fetch_ghost3(values, n, j + 1) - fetch_ghost3(values, n, j)) / h;
    }
    return weno5_edge(f[0], f[1], f[2], f[3], f[4]);
}

// Right-biased derivative at node k (window k-2..k+3) via mirror symmetry.
template <class V>
inline double weno5_right_at(const V& values, long n, long k, double h) {
    double f[5];
    for (long m = 0; m < 5; ++m) {
        const long j = k + 3 - m;  // mirrored cells [x_{j-1}, x_j]
        f[m] = (fetch_ghost3(values, n, j - 1) - fetch_ghost3(values, n, j)) / h;
    }
    return -weno5_edge(f[0], f[1], f[2], f[3], f[4]);
}

} // namespace detail

struct WenoDerivatives {
    std::vector<double> left_biased;
    std::vector<double> right_biased;
};

inline WenoDerivatives weno5_derivatives(std::span<const double> values,
                                         const UniformGrid1D& grid) {
    const long n = static_cast<long>(values.size());
    if (n != grid.n_nodes()) {
        throw ConfigError("weno5_derivatives: values/grid size mismatch");
    }
    if (n < 7) {
        throw ConfigError("weno5_derivatives: need at least 7 nodes, got " +
                          std::to_string(n));
    }
    const double h = grid.spacing();
    WenoDerivatives d;
    d.left_biased.resize(n);
    d.right_biased.resize(n);
    for (long k = 0; k < n; ++k) {
        d.left_biased[k] = detail::weno5_left_at(values, n, k, h);
        d.right_biased[k] = detail::weno5_right_at(values, n, k, h);
    }
    return d;
}

namespace detail {

template <class V>
inline double fetch_ghost2(const V& values, long n, long k) {
    if (k < 0) return (1.0 - k) * values[0] + k * values[1];
    if (k >= n) {
        const long m = k - (n - 1);
        return (1.0 + m) * values[n - 1] - m * values[n - 2];
    }
    return values[k];
}

} // namespace detail

// Third-order WENO interpolation at x_query in [lower, upper]. Two quadratic
// candidates on {j-1,j,j+1} and {j,j+1,j+2} are blended with positive linear
// weights (2-s)/3 and (1+s)/3, which reproduces the four-point cubic when the
// data is smooth; squared second differences steer the blend away from a
// kinked stencil. Exact at nodes and for constant data.
inline double weno3_interpolate(std::span<const double> values,
                                const UniformGrid1D& grid, double x_query) {
    const long n = static_cast<long>(values.size());
    if (n != grid.n_nodes()) {
        throw ConfigError("weno3_interpolate: values/grid size mismatch");
    }
    if (!grid.contains(x_query)) {
        throw ConfigError("weno3_interpolate: query outside [lower, upper]");
    }

    int j;
    double s;
    grid.locate(x_query, j, s);
    // Snap to the node when the local coordinate is an integer up to rounding,
    // so nodal queries reproduce nodal values exactly.
    if (s < 1e-10) return values[j];
    if (s > 1.0 - 1e-10) return values[j + 1];

    const double vm = detail::fetch_ghost2(values, n, static_cast<long>(j) - 1);
    const double v0 = values[j];
    const double v1 = values[j + 1];
    const double vp = detail::fetch_ghost2(values, n, static_cast<long>(j) + 2);

    const double d2l = vm - 2.0 * v0 + v1;
    const double d2r = v0 - 2.0 * v1 + vp;
    const double ql = v0 + s * (v1 - v0) + 0.5 * s * (s - 1.0) * d2l;
    const double qr = v0 + s * (v1 - v0) + 0.5 * s * (s - 1.0) * d2r;

    const double cl = (2.0 - s) / 3.0;
    const double cr = (1.0 + s) / 3.0;
    const double al = cl / ((kWenoEps + d2l * d2l) * (kWenoEps + d2l * d2l));
    const double ar = cr / ((kWenoEps + d2r * d2r) * (kWenoEps + d2r * d2r));
    return (al * ql + ar * qr) / (al + ar);
}

} // namespace riverdp

#endif
