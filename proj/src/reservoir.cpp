#include "riverdp/reservoir.hpp"

#include <algorithm>
#include <cmath>

#include "riverdp/errors.hpp"
#include "riverdp/tridiag.hpp"
#include "riverdp/weno.hpp"

namespace riverdp {

void ReservoirParams::validate() const {
    if (!(capacity > 0.0)) throw ConfigError("reservoir: capacity must be > 0");
    if (!(discount > 0.0)) throw ConfigError("reservoir: discount must be > 0");
    if (weight_a < 0.0) throw ConfigError("reservoir: weight_a must be >= 0");
    if (!(q_min < q_max)) throw ConfigError("reservoir: requires q_min < q_max");
    for (int i = 0; i < chain.n_regimes(); ++i) {
        if (!(q_min < chain.discharge(i))) {
            throw ConfigError("reservoir: q_min must be below every inflow Q(i)");
        }
        if (!(q_max > chain.discharge(i))) {
            throw ConfigError("reservoir: q_max must be above every inflow Q(i)");
        }
    }
}

std::pair<double, double> reservoir_admissible_interval(double y, double q_inflow,
                                                        const ReservoirParams& p) {
    if (y <= 0.0) return {p.q_min, q_inflow};
    if (y >= 1.0) return {q_inflow, p.q_max};
    return {p.q_min, p.q_max};
}

HamiltonianMin reservoir_hamiltonian_min(double dphi, double q_inflow, double q_lo,
                                         double q_hi, double q_hat, double a,
                                         double f_val) {
    auto objective = [&](double q) {
        const double dev = q - q_inflow;
        const double env = std::max(q_hat - q, 0.0);
        return (q_inflow - q) * dphi + 0.5 * dev * dev + 0.5 * a * env * env;
    };
    // Stationary points of the two quadratic branches, the kink, and the ends.
    double candidates[5];
    int n_cand = 0;
    candidates[n_cand++] = q_lo;
    candidates[n_cand++] = q_hi;
    candidates[n_cand++] = std::clamp(q_hat, q_lo, q_hi);
    candidates[n_cand++] = std::clamp(q_inflow + dphi, std::max(q_hat, q_lo), q_hi);
    candidates[n_cand++] = std::clamp((q_inflow + dphi + a * q_hat) / (1.0 + a),
                                      q_lo, std::min(q_hat, q_hi));

    HamiltonianMin best{objective(candidates[0]), candidates[0]};
    for (int i = 1; i < n_cand; ++i) {
        const double v = objective(candidates[i]);
        const double tol = 1e-12 * (1.0 + std::abs(best.min_value));
        if (v < best.min_value - tol ||
            (std::abs(v - best.min_value) <= tol && candidates[i] < best.q_star)) {
            best.min_value = v;
            best.q_star = candidates[i];
        }
    }
    best.min_value += f_val;
    return best;
}

namespace detail {

double reservoir_nodal_update(double phi_left, double phi_right, double h,
                              double coupling_sum, double exit_rate, double sigma,
                              double r_minus, double r_plus, double q_inflow_n,
                              double q_lo_n, double q_hi_n, double q_hat_n, double a,
                              double f_val, double discount) {
    const double p_bar = (phi_right - phi_left) / (2.0 * h) + 0.5 * (r_plus + r_minus);
    const double g = reservoir_hamiltonian_min(p_bar, q_inflow_n, q_lo_n, q_hi_n,
                                               q_hat_n, a, f_val)
                         .min_value;
    const double numer = coupling_sum + g + sigma * (phi_left + phi_right) / (2.0 * h) +
                         0.5 * sigma * (r_plus - r_minus);
    return numer / (discount + exit_rate + sigma / h);
}

} // namespace detail

namespace {

// Dense Gaussian elimination with partial pivoting for the small per-regime
// coarse system of the sweep accelerator.
std::vector<double> dense_solve_small(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (a[piv * n + col] == 0.0) {
            throw NumericError("reservoir: singular coarse correction system");
        }
        for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

struct Normalized {
    std::vector<double> q_inflow;  // per regime
    double q_min, q_max, q_hat;
};

// Signed residual of the discrete equation at an interior node.
double residual_point(const ReservoirParams& p, const Normalized& nz,
                      const std::vector<double>& values, int n, int i, int k,
                      double h, double f_k) {
    const double* row = &values[static_cast<std::size_t>(i) * n];
    const double sigma =
        std::max(nz.q_inflow[i] - nz.q_min, nz.q_max - nz.q_inflow[i]);
    const double pm = detail::weno5_left_at(row, n, k, h);
    const double pp = detail::weno5_right_at(row, n, k, h);
    const double g = reservoir_hamiltonian_min(0.5 * (pm + pp), nz.q_inflow[i],
                                               nz.q_min, nz.q_max, nz.q_hat,
                                               p.weight_a, f_k)
                         .min_value;
    double coupling = 0.0;
    for (const auto& [j, s] : p.chain.transitions(i)) {
        coupling += s * (row[k] - values[static_cast<std::size_t>(j) * n + k]);
    }
    return p.discount * row[k] + coupling - g - 0.5 * sigma * (pp - pm);
}

Normalized normalize(const ReservoirParams& p) {
    Normalized n;
    n.q_min = p.normalize_q(p.q_min);
    n.q_max = p.normalize_q(p.q_max);
    n.q_hat = p.normalize_q(p.env_flow);
    n.q_inflow.resize(p.chain.n_regimes());
    for (int i = 0; i < p.chain.n_regimes(); ++i) {
        n.q_inflow[i] = p.normalize_q(p.chain.discharge(i));
    }
    return n;
}

} // namespace

StationaryValue reservoir_solve_stationary(const ReservoirParams& p, int n_nodes,
                                           double tolerance, int max_sweeps) {
    p.validate();
    if (n_nodes < 7) throw ConfigError("reservoir: need at least 7 nodes");
    const Normalized nz = normalize(p);
    const int I = p.chain.n_regimes();
    const int n = n_nodes;

    StationaryValue out;
    out.grid = UniformGrid1D(0.0, 1.0, n);
    out.n_regimes = I;
    out.values.assign(static_cast<std::size_t>(I) * n, 0.0);
    out.policy.assign(static_cast<std::size_t>(I) * n, 0.0);
    const double h = out.grid.spacing();

    // Lax-Friedrichs dissipation: the sharp bound max |Q(i) - q| over the
    // admissible set at each node class (interior / y=0 / y=1).
    std::vector<double> sigma_int(I);
    for (int i = 0; i < I; ++i) {
        sigma_int[i] = std::max(nz.q_inflow[i] - nz.q_min, nz.q_max - nz.q_inflow[i]);
    }
    std::vector<double> f_node(n);
    for (int k = 0; k < n; ++k) f_node[k] = p.penalty(out.grid.node(k));

    auto coupling_sum_at = [&](int i, int k) {
        double sum = 0.0;
        for (const auto& [j, s] : p.chain.transitions(i)) {
            sum += s * out.values[static_cast<std::size_t>(j) * n + k];
        }
        return sum;
    };

    // High-order corrections r = p_weno - p_two_point, lagged per sweep.
    // Refreshing them mid-sweep makes the Gauss-Seidel map direction-dependent
    // and the iteration settles into a two-cycle at truncation level, so each
    // sweep works against corrections frozen at its start, blended with a
    // damping factor that shrinks whenever progress stalls.
    std::vector<double> r_minus(static_cast<std::size_t>(I) * n, 0.0);
    std::vector<double> r_plus(static_cast<std::size_t>(I) * n, 0.0);
    const double blend = 0.5;

    auto refresh_corrections = [&]() {
        for (int i = 0; i < I; ++i) {
            const double* row = &out.values[static_cast<std::size_t>(i) * n];
            for (int k = 1; k < n - 1; ++k) {
                const double pm = detail::weno5_left_at(row, n, k, h);
                const double pp = detail::weno5_right_at(row, n, k, h);
                const double rm = pm - (row[k] - row[k - 1]) / h;
                const double rp = pp - (row[k + 1] - row[k]) / h;
                const std::size_t ik = static_cast<std::size_t>(i) * n + k;
                r_minus[ik] += blend * (rm - r_minus[ik]);
                r_plus[ik] += blend * (rp - r_plus[ik]);
            }
        }
    };

    // One implicit line solve for regime i with the minimizing discharges and
    // the high-order corrections frozen: the balanced region is dissipation
    // dominated (the update behaves like a diffusion of strength sigma h / 2),
    // where pointwise Gauss-Seidel stalls on smooth modes; solving the spatial
    // direction exactly keeps the full-scale solve inside the sweep budget.
    // The assembled rows are exactly the nodal equations, so the fixed point
    // is unchanged.
    TridiagonalSystem line;
    auto sweep_regime = [&](int i) {
        double* row = &out.values[static_cast<std::size_t>(i) * n];
        const double exit = p.chain.exit_rate(i);
        line.sub.assign(n - 1, 0.0);
        line.diag.assign(n, 0.0);
        line.sup.assign(n - 1, 0.0);
        line.rhs.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const std::size_t ik = static_cast<std::size_t>(i) * n + k;
            if (k == 0 || k == n - 1) {
                const double q_lo = (k == 0) ? nz.q_min : nz.q_inflow[i];
                const double q_hi = (k == 0) ? nz.q_inflow[i] : nz.q_max;
                const int inward = (k == 0) ? 1 : -1;
                const double p_one = inward * (row[k + inward] - row[k]) / h;
                const auto hm =
                    reservoir_hamiltonian_min(p_one, nz.q_inflow[i], q_lo, q_hi,
                                              nz.q_hat, p.weight_a, f_node[k]);
                const double speed = std::abs(nz.q_inflow[i] - hm.q_star);
                const double dev = hm.q_star - nz.q_inflow[i];
                const double env = std::max(nz.q_hat - hm.q_star, 0.0);
                line.diag[k] = p.discount + exit + speed / h;
                if (k == 0) line.sup[0] = -speed / h;
                else line.sub[n - 2] = -speed / h;
                line.rhs[k] = coupling_sum_at(i, k) + 0.5 * dev * dev +
                              0.5 * p.weight_a * env * env + f_node[k];
                out.policy[ik] = hm.q_star / nz.q_inflow[i];
                continue;
            }
            const double r_bar = 0.5 * (r_plus[ik] + r_minus[ik]);
            const double p_bar = (row[k + 1] - row[k - 1]) / (2.0 * h) + r_bar;
            const auto hm =
                reservoir_hamiltonian_min(p_bar, nz.q_inflow[i], nz.q_min,
                                          nz.q_max, nz.q_hat, p.weight_a, 0.0);
            const double b_star = nz.q_inflow[i] - hm.q_star;
            const double dev = hm.q_star - nz.q_inflow[i];
            const double env = std::max(nz.q_hat - hm.q_star, 0.0);
            const double sigma = sigma_int[i];
            line.diag[k] = p.discount + exit + sigma / h;
            line.sup[k] = -(sigma + b_star) / (2.0 * h);
            line.sub[k - 1] = -(sigma - b_star) / (2.0 * h);
            line.rhs[k] = coupling_sum_at(i, k) + 0.5 * dev * dev +
                          0.5 * p.weight_a * env * env + f_node[k] +
                          b_star * r_bar +
                          0.5 * sigma * (r_plus[ik] - r_minus[ik]);
            out.policy[ik] = hm.q_star / nz.q_inflow[i];
        }
        std::vector<double> solved = thomas_solve(line);
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(solved[k] - row[k]));
            row[k] = solved[k];
        }
        return worst;
    };

    // Two-level acceleration: the modes that are uniform in y per regime are
    // damped only by the discount and relax slowly through the sweeps, so
    // every few sweeps the y-averaged residual is annihilated exactly by a
    // per-regime constant shift (constants leave all derivatives and the
    // Hamiltonian untouched, so only delta and the regime coupling respond).
    const int accel_stride = 10;
    auto coarse_correction = [&]() {
        std::vector<double> mean_res(I, 0.0);
        for (int i = 0; i < I; ++i) {
            double sum = 0.0;
            for (int k = 1; k < n - 1; ++k) {
                sum += residual_point(p, nz, out.values, n, i, k, h, f_node[k]);
            }
            mean_res[i] = sum / static_cast<double>(n - 2);
        }
        std::vector<double> a(static_cast<std::size_t>(I) * I, 0.0);
        for (int i = 0; i < I; ++i) {
            a[static_cast<std::size_t>(i) * I + i] = p.discount + p.chain.exit_rate(i);
            for (const auto& [j, s] : p.chain.transitions(i)) {
                a[static_cast<std::size_t>(i) * I + j] -= s;
            }
            mean_res[i] = -mean_res[i];
        }
        std::vector<double> shift = dense_solve_small(std::move(a), std::move(mean_res));
        double largest = 0.0;
        for (int i = 0; i < I; ++i) {
            largest = std::max(largest, std::abs(shift[i]));
            double* row = &out.values[static_cast<std::size_t>(i) * n];
            for (int k = 0; k < n; ++k) row[k] += shift[i];
        }
        return largest;
    };

    double change = 0.0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        refresh_corrections();
        change = 0.0;
        // Alternate the regime ordering so the chain coupling is swept from
        // both ends.
        const bool forward = (sweep % 2 == 1);
        for (int step = 0; step < I; ++step) {
            const int i = forward ? step : I - 1 - step;
            change = std::max(change, sweep_regime(i));
        }
        if (sweep % accel_stride == 0) {
            change = std::max(change, coarse_correction());
        }
        out.residual_history.push_back(change);
        out.iterations = sweep;
        if (change <= tolerance) {
            // Confirm the fixed point: the lagged high-order corrections must
            // have settled too, so the discrete-equation residual is checked
            // before declaring convergence.
            if (reservoir_discrete_residual(p, out) <= 10.0 * tolerance) {
                out.converged = true;
                break;
            }
        }
    }

    // Final policy extraction at the converged derivatives (interior nodes).
    for (int i = 0; i < I; ++i) {
        double* row = &out.values[static_cast<std::size_t>(i) * n];
        for (int k = 1; k < n - 1; ++k) {
            const double pm = detail::weno5_left_at(row, n, k, h);
            const double pp = detail::weno5_right_at(row, n, k, h);
            const auto hm =
                reservoir_hamiltonian_min(0.5 * (pm + pp), nz.q_inflow[i], nz.q_min,
                                          nz.q_max, nz.q_hat, p.weight_a, f_node[k]);
            out.policy[static_cast<std::size_t>(i) * n + k] = hm.q_star / nz.q_inflow[i];
        }
    }
    return out;
}

double reservoir_discrete_residual(const ReservoirParams& p,
                                   const StationaryValue& v) {
    const Normalized nz = normalize(p);
    const int I = v.n_regimes;
    const int n = v.grid.n_nodes();
    const double h = v.grid.spacing();
    double worst = 0.0;
    for (int i = 0; i < I; ++i) {
        for (int k = 1; k < n - 1; ++k) {
            worst = std::max(
                worst, std::abs(residual_point(p, nz, v.values, n, i, k, h,
                                               p.penalty(v.grid.node(k)))));
        }
    }
    return worst;
}

EstimateReport reservoir_mc_verify(const ReservoirParams& p, const StationaryValue& v,
                                   double y0, int i0, double horizon, int n_paths,
                                   std::uint64_t rng_seed) {
    if (!(std::exp(-p.discount * horizon) <= 0.01)) {
        throw ConfigError("reservoir_mc_verify: horizon too short");
    }
    const Normalized nz = normalize(p);
    const int n = v.grid.n_nodes();

    auto policy_q = [&](int i, double y) {
        int j;
        double th;
        v.grid.locate(y, j, th);
        const double* row = &v.policy[static_cast<std::size_t>(i) * n];
        const double frac = (1.0 - th) * row[j] + th * row[j + 1];
        return frac * nz.q_inflow[i];  // normalized discharge
    };

    const double dt = 0.02;  // day
    std::vector<double> samples;
    samples.reserve(n_paths);
    for (int path = 0; path < n_paths; ++path) {
        Rng rng = substream(rng_seed, static_cast<std::uint64_t>(path));
        auto segments = sample_path(p.chain, i0, horizon, rng);
        segments.push_back({horizon, segments.back().regime});

        CostAccumulator acc(p.discount);
        double y = y0;
        for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
            const int i = segments[s].regime;
            const double t_end = segments[s + 1].time;
            while (acc.time() < t_end - 1e-12) {
                const double step = std::min(dt, t_end - acc.time());
                // Midpoint integration of the storage and cost rate.
                const double q1 = policy_q(i, y);
                const double ymid =
                    std::clamp(y + 0.5 * step * (nz.q_inflow[i] - q1), 0.0, 1.0);
                const double q = policy_q(i, ymid);
                const double dev = q - nz.q_inflow[i];
                const double env = std::max(nz.q_hat - q, 0.0);
                const double rate =
                    0.5 * dev * dev + 0.5 * p.weight_a * env * env + p.penalty(ymid);
                acc.add_segment(rate, step);
                y = std::clamp(y + step * (nz.q_inflow[i] - q), 0.0, 1.0);
            }
        }
        samples.push_back(acc.total());
    }
    return estimate(samples, rng_seed);
}

} // namespace riverdp
