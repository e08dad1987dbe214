// Tridiagonal systems and the Thomas solver.
#ifndef RIVERDP_TRIDIAG_HPP
#define RIVERDP_TRIDIAG_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "riverdp/errors.hpp"

namespace riverdp {

// A x = rhs with A tridiagonal. Callers are responsible for strict diagonal
// dominance |diag_k| > |sub_{k-1}| + |sup_k| where the solve must not pivot.
struct TridiagonalSystem {
    std::vector<double> sub;  // size n-1, A(k, k-1)
    std::vector<double> diag; // size n
    std::vector<double> sup;  // size n-1, A(k, k+1)
    std::vector<double> rhs;  // size n
};

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    const std::size_t n = sys.diag.size();
    if (n == 0 || sys.rhs.size() != n || sys.sub.size() + 1 != n ||
        sys.sup.size() + 1 != n) {
        throw ConfigError("thomas_solve: inconsistent band sizes");
    }

    double max_diag = 0.0;
    for (double d : sys.diag) max_diag = std::max(max_diag, std::abs(d));
    const double pivot_tol = 1e-14 * max_diag;

    std::vector<double> c(n - 1), x(n);
    double pivot = sys.diag[0];
    if (!(std::abs(pivot) > pivot_tol)) {
        throw NumericError("thomas_solve: singular pivot at row 0");
    }
    if (n > 1) c[0] = sys.sup[0] / pivot;
    x[0] = sys.rhs[0] / pivot;
    for (std::size_t k = 1; k < n; ++k) {
        pivot = sys.diag[k] - sys.sub[k - 1] * c[k - 1];
        if (!(std::abs(pivot) > pivot_tol)) {
            throw NumericError("thomas_solve: singular pivot at row " +
                               std::to_string(k));
        }
        if (k < n - 1) c[k] = sys.sup[k] / pivot;
        x[k] = (sys.rhs[k] - sys.sub[k - 1] * x[k - 1]) / pivot;
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        x[k] -= c[k] * x[k + 1];
    }
    return x;
}

} // namespace riverdp

#endif
