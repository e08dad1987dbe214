#include "riverdp/algae.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "riverdp/errors.hpp"
#include "riverdp/poly.hpp"
#include "riverdp/tridiag.hpp"

namespace riverdp {

void AlgaeParams::validate() const {
    if (!(growth_rate > 0.0)) throw ConfigError("algae: growth_rate must be > 0");
    if (!(detachment > 0.0)) throw ConfigError("algae: detachment must be > 0");
    if (!(discount > 0.0)) throw ConfigError("algae: discount must be > 0");
    if (!(0.0 < q_min && q_min < q_target && q_target < q_max)) {
        throw ConfigError("algae: requires 0 < q_min < q_target < q_max");
    }
    if (!(weight_a > 0.0)) throw ConfigError("algae: weight_a must be > 0");
    if (!(cost_exponent > 0.0)) throw ConfigError("algae: cost_exponent must be > 0");
    if (!(capacity_k0 > 0.0) || capacity_k1 < 0.0) {
        throw ConfigError("algae: requires K0 > 0 and K1 >= 0");
    }
}

double algae_drift(double z, double q, const AlgaeParams& p) {
    return p.growth_rate * z * (1.0 - z / p.capacity(q)) - p.detachment * q * z;
}

namespace {

double objective(double z, double q, double dphi, const AlgaeParams& p) {
    return algae_drift(z, q, p) * dphi +
           0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
           std::pow(z, p.cost_exponent);
}

} // namespace

namespace {

// Real roots of the first-order condition for a fixed derivative dphi,
// clamped to the admissible interval (plus nothing when degenerate).
void foc_candidates(double z, double dphi, const AlgaeParams& p,
                    std::vector<double>& out) {
    if (p.capacity_k1 == 0.0) {
        out.push_back(std::clamp(
            p.q_target + p.detachment * z * dphi / p.weight_a, p.q_min, p.q_max));
        return;
    }
    const double k0 = p.capacity_k0;
    const double k1 = p.capacity_k1;
    const double a = p.weight_a;
    const double qh = p.q_target;
    const double s = dphi * z * p.detachment;
    const double c3 = a * k1 * k1;
    const double c2 = a * (2.0 * k0 * k1 - qh * k1 * k1) - s * k1 * k1;
    const double c1 = a * (k0 * k0 - 2.0 * qh * k0 * k1) - 2.0 * s * k0 * k1;
    const double c0 =
        -a * qh * k0 * k0 - s * k0 * k0 + dphi * z * z * p.growth_rate * k1;
    for (double r : solve_cubic_real(c3, c2, c1, c0)) {
        if (std::isfinite(r) && r >= p.q_min && r <= p.q_max) out.push_back(r);
    }
}

// Discharges where the drift changes sign (branch kinks of the upwind
// Hamiltonian): alpha K1 q^2 + (alpha K0 - r K1) q + r (z - K0) = 0.
void drift_zero_candidates(double z, const AlgaeParams& p,
                           std::vector<double>& out) {
    const double c2 = p.detachment * p.capacity_k1;
    const double c1 = p.detachment * p.capacity_k0 - p.growth_rate * p.capacity_k1;
    const double c0 = p.growth_rate * (z - p.capacity_k0);
    for (double r : solve_cubic_real(0.0, c2, c1, c0)) {
        if (std::isfinite(r) && r >= p.q_min && r <= p.q_max) out.push_back(r);
    }
}

} // namespace

AlgaeMinimum algae_inner_minimize(double z, double dphi, const AlgaeParams& p) {
    std::vector<double> candidates{p.q_min, p.q_max};
    const std::size_t before = candidates.size();
    foc_candidates(z, dphi, p, candidates);
    if (p.capacity_k1 != 0.0 && candidates.size() == before &&
        std::abs(dphi) > 0.0) {
        // No admissible stationary point survived a degenerate cubic solve;
        // fall back to dense sampling.
        std::cerr << "algae_inner_minimize: dense fallback engaged\n";
        AlgaeMinimum best{objective(z, p.q_min, dphi, p), p.q_min, true};
        const int samples = 10000;
        for (int i = 1; i <= samples; ++i) {
            const double q =
                p.q_min + (p.q_max - p.q_min) * static_cast<double>(i) / samples;
            const double v = objective(z, q, dphi, p);
            if (v < best.min_value) best = {v, q, true};
        }
        return best;
    }

    AlgaeMinimum best{objective(z, candidates[0], dphi, p), candidates[0], false};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double q = candidates[i];
        const double v = objective(z, q, dphi, p);
        const double gap = v - best.min_value;
        const double tie_tol = 1e-12 * (1.0 + std::abs(best.min_value));
        if (gap < -tie_tol ||
            (std::abs(gap) <= tie_tol &&
             std::abs(q - p.q_target) < std::abs(best.q_star - p.q_target))) {
            best.min_value = v;
            best.q_star = q;
        }
    }
    return best;
}

namespace {

// Policy improvement for the monotone upwind scheme: minimize the discrete
// Hamiltonian max(b,0) dfwd + min(b,0) dbwd + cost over the admissible range.
// Candidates are the branch-wise stationary points, the drift sign changes,
// the endpoints, and the target discharge.
double improve_upwind(double z, double dfwd, double dbwd, const AlgaeParams& p) {
    std::vector<double> candidates{p.q_min, p.q_max, p.q_target};
    foc_candidates(z, dfwd, p, candidates);
    foc_candidates(z, dbwd, p, candidates);
    drift_zero_candidates(z, p, candidates);

    auto upwind_objective = [&](double q) {
        const double b = algae_drift(z, q, p);
        const double transport = (b > 0.0) ? b * dfwd : b * dbwd;
        return transport +
               0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
               std::pow(z, p.cost_exponent);
    };
    double best_q = candidates[0];
    double best = upwind_objective(best_q);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double q = candidates[i];
        const double v = upwind_objective(q);
        const double tie_tol = 1e-12 * (1.0 + std::abs(best));
        if (v < best - tie_tol ||
            (std::abs(v - best) <= tie_tol &&
             std::abs(q - p.q_target) < std::abs(best_q - p.q_target))) {
            best = v;
            best_q = q;
        }
    }
    return best_q;
}

} // namespace

namespace {

// Policy evaluation: delta Phi - b(z, q) D_upwind(Phi) = cost(z, q).
// Upwinding puts the drift mass off-diagonal with the correct sign, so the
// matrix is strictly diagonally dominant for delta > 0.
std::vector<double> evaluate_policy(const AlgaeParams& p, const UniformGrid1D& grid,
                                    const std::vector<double>& policy) {
    const int n = grid.n_nodes();
    const double h = grid.spacing();
    TridiagonalSystem sys;
    sys.sub.assign(n - 1, 0.0);
    sys.diag.assign(n, 0.0);
    sys.sup.assign(n - 1, 0.0);
    sys.rhs.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double z = grid.node(k);
        const double q = policy[k];
        const double b = algae_drift(z, q, p);
        double diag = p.discount;
        if (b > 0.0 && k < n - 1) {
            diag += b / h;
            sys.sup[k] = -b / h;
        } else if (b < 0.0 && k > 0) {
            diag += -b / h;
            sys.sub[k - 1] = b / h;
        } else if (b != 0.0) {
            throw NumericError("algae: drift points out of the domain at node " +
                               std::to_string(k));
        }
        sys.diag[k] = diag;
        sys.rhs[k] = 0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
                     std::pow(z, p.cost_exponent);
        // Dominance check at assembly time.
        const double off = (k > 0 ? std::abs(sys.sub[k - 1]) : 0.0) +
                           (k < n - 1 ? std::abs(sys.sup[k]) : 0.0);
        if (!(std::abs(diag) > off)) {
            throw NumericError("algae: evaluation matrix not diagonally dominant");
        }
    }
    return thomas_solve(sys);
}

// Exponentially fitted variant: with the policy frozen, the equation along
// the drift characteristic through one cell integrates exactly for constant
// coefficients, Phi_k = e^{-delta tau} Phi_up + (1 - e^{-delta tau}) c_k/delta
// with tau = h/|b_k|. Still a two-point monotone relation per node.
//
// Its policy improvement must minimize the same fitted one-step objective
// (not the finite-difference Hamiltonian), otherwise the two halves of the
// iteration disagree and the policies cycle. The improvement therefore scans
// a fixed discharge menu, which also gives Howard's finite termination.
double expfit_objective(double z, double q, double phi_fwd, double phi_bwd,
                        bool has_fwd, bool has_bwd, double h,
                        const AlgaeParams& p) {
    const double b = algae_drift(z, q, p);
    const double cost = 0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
                        std::pow(z, p.cost_exponent);
    if (b > 0.0 && has_fwd) {
        const double w = std::exp(-p.discount * h / b);
        return w * phi_fwd + (1.0 - w) * cost / p.discount;
    }
    if (b < 0.0 && has_bwd) {
        const double w = std::exp(-p.discount * h / (-b));
        return w * phi_bwd + (1.0 - w) * cost / p.discount;
    }
    return cost / p.discount;
}

double improve_expfit(double z, double phi_fwd, double phi_bwd, bool has_fwd,
                      bool has_bwd, double h, const AlgaeParams& p) {
    const int menu = 200;
    double best_q = p.q_target;
    double best = expfit_objective(z, p.q_target, phi_fwd, phi_bwd, has_fwd,
                                   has_bwd, h, p);
    for (int i = 0; i <= menu; ++i) {
        const double q = p.q_min + (p.q_max - p.q_min) * i / menu;
        const double v =
            expfit_objective(z, q, phi_fwd, phi_bwd, has_fwd, has_bwd, h, p);
        const double tol = 1e-12 * (1.0 + std::abs(best));
        if (v < best - tol ||
            (std::abs(v - best) <= tol &&
             std::abs(q - p.q_target) < std::abs(best_q - p.q_target))) {
            best = v;
            best_q = q;
        }
    }
    return best_q;
}

std::vector<double> evaluate_policy_expfit(const AlgaeParams& p,
                                           const UniformGrid1D& grid,
                                           const std::vector<double>& policy) {
    const int n = grid.n_nodes();
    const double h = grid.spacing();
    TridiagonalSystem sys;
    sys.sub.assign(n - 1, 0.0);
    sys.diag.assign(n, 1.0);
    sys.sup.assign(n - 1, 0.0);
    sys.rhs.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double z = grid.node(k);
        const double q = policy[k];
        const double b = algae_drift(z, q, p);
        const double cost = 0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
                            std::pow(z, p.cost_exponent);
        if (b > 0.0 && k < n - 1) {
            const double w = std::exp(-p.discount * h / b);
            sys.sup[k] = -w;
            sys.rhs[k] = (1.0 - w) * cost / p.discount;
        } else if (b < 0.0 && k > 0) {
            const double w = std::exp(-p.discount * h / (-b));
            sys.sub[k - 1] = -w;
            sys.rhs[k] = (1.0 - w) * cost / p.discount;
        } else {
            sys.rhs[k] = cost / p.discount;
        }
    }
    return thomas_solve(sys);
}

} // namespace

AlgaePolicySolution algae_solve_policy_iteration(const AlgaeParams& p, int n_nodes,
                                                 double tolerance,
                                                 int max_iterations) {
    p.validate();
    if (n_nodes < 3) throw ConfigError("algae: need at least 3 nodes");

    AlgaePolicySolution s;
    s.grid = UniformGrid1D(0.0, p.domain_upper(), n_nodes);
    s.value.assign(n_nodes, 0.0);
    s.policy.assign(n_nodes, p.q_target);
    const double h = s.grid.spacing();

    for (int it = 1; it <= max_iterations; ++it) {
        // Improvement against the frozen value, branch-aware upwinding.
        for (int k = 0; k < n_nodes; ++k) {
            const double z = s.grid.node(k);
            if (p.scheme == AlgaeScheme::kExponential) {
                s.policy[k] = improve_expfit(
                    z, (k < n_nodes - 1) ? s.value[k + 1] : 0.0,
                    (k > 0) ? s.value[k - 1] : 0.0, k < n_nodes - 1, k > 0, h, p);
                continue;
            }
            const double dfwd =
                (k < n_nodes - 1) ? (s.value[k + 1] - s.value[k]) / h : 0.0;
            const double dbwd = (k > 0) ? (s.value[k] - s.value[k - 1]) / h : 0.0;
            s.policy[k] = improve_upwind(z, dfwd, dbwd, p);
        }
        // Evaluation with the improved policy frozen.
        std::vector<double> next =
            (p.scheme == AlgaeScheme::kExponential)
                ? evaluate_policy_expfit(p, s.grid, s.policy)
                : evaluate_policy(p, s.grid, s.policy);
        double change = 0.0;
        for (int k = 0; k < n_nodes; ++k) {
            change = std::max(change, std::abs(next[k] - s.value[k]));
        }
        s.value = std::move(next);
        s.iterations = it;
        if (change <= tolerance) {
            s.converged = true;
            break;
        }
    }
    return s;
}

double algae_policy_transition_metric(const AlgaePolicySolution& s) {
    double jump = 0.0;
    for (std::size_t k = 1; k < s.policy.size(); ++k) {
        jump = std::max(jump, std::abs(s.policy[k] - s.policy[k - 1]));
    }
    return jump;
}

} // namespace riverdp
