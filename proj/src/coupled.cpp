#include "riverdp/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riverdp/errors.hpp"

namespace riverdp {

void CoupledParams::validate() const {
    if (!(reservoir_capacity > 0.0) || !(sediment_capacity > 0.0)) {
        throw ConfigError("coupled: capacities must be > 0");
    }
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw ConfigError("coupled: horizon and dt must be > 0");
    }
    if (grid_level < 3) throw ConfigError("coupled: grid_level must be >= 3");
    if (intensity < 0.0 || discount < 0.0) {
        throw ConfigError("coupled: intensity and discount must be >= 0");
    }
    if (cost_power < 1.0) throw ConfigError("coupled: cost_power must be >= 1");
    if (x1_hi == 1.0 || x1_hi == 0.0 || x2_lo == 0.0 || x3_hi == 1.0) {
        throw ConfigError("coupled: cost thresholds make a denominator vanish");
    }
    bool has_zero = false;
    double max_a = 0.0;
    for (double a : a_coeffs) {
        if (a < 0.0) throw ConfigError("coupled: multipliers a_j must be >= 0");
        if (a == 0.0) has_zero = true;
        max_a = std::max(max_a, a);
    }
    if (!has_zero) throw ConfigError("coupled: multiplier menu must contain a_0 = 0");
    if (!(max_a >= 1.0)) {
        throw ConfigError("coupled: multiplier menu needs an entry >= 1 for the "
                          "full-storage boundary");
    }
    // Explicit couplings are applied with the next time slice, so the combined
    // rates must respect the positivity bound (1 - dt (delta + lambda + sum_j
    // s_ij)) >= 0.
    double max_exit = 0.0;
    for (int i = 0; i < chain.n_regimes(); ++i) {
        max_exit = std::max(max_exit, chain.exit_rate(i));
    }
    if (dt * (discount + intensity + max_exit) > 1.0) {
        throw ConfigError("coupled: dt violates the explicit stability bound "
                          "dt (delta + lambda + max_i sum_j s_ij) <= 1");
    }
}

double coupled_transport_rate(double q, const CoupledParams& p) {
    if (q < 0.0) throw ConfigError("coupled_transport_rate: q must be >= 0");
    const double excess = std::max(p.trans_b * std::pow(q, 0.6) - p.trans_c, 0.0);
    return p.trans_a / p.sediment_capacity * std::pow(excess, 1.5);
}

double coupled_detachment(double x2, const CoupledParams& p) {
    return p.alpha0 * std::pow(x2, p.alpha_m);
}

double coupled_running_cost(double x1, double x2, double x3,
                            const CoupledParams& p) {
    const double pw = p.cost_power;
    const double t1 = std::pow(std::max(x1 - p.x1_hi, 0.0), pw) /
                      std::pow(1.0 - p.x1_hi, pw);
    const double t2 =
        std::pow(std::max(p.x1_lo - x1, 0.0), pw) / std::pow(p.x1_hi, pw);
    const double t3 =
        std::pow(std::max(p.x2_lo - x2, 0.0), pw) / std::pow(p.x2_lo, pw);
    const double t4 = std::pow(std::max(x3 - p.x3_hi, 0.0), pw) /
                      std::pow(1.0 - p.x3_hi, pw);
    return t1 + t2 + t3 + t4;
}

std::vector<std::pair<int, double>> coupled_admissible_discharges(
    double x1, double q_inflow, const CoupledParams& p) {
    std::vector<std::pair<int, double>> menu;
    menu.reserve(p.a_coeffs.size());
    for (int j = 0; j < static_cast<int>(p.a_coeffs.size()); ++j) {
        const double a = p.a_coeffs[j];
        if (x1 <= 0.0 && a > 1.0) continue;   // empty storage: no net drawdown
        if (x1 >= 1.0 && a < 1.0) continue;   // full storage: no net fill
        menu.emplace_back(j, a * q_inflow);
    }
    return menu;
}

CoupledSolver::CoupledSolver(CoupledParams params)
    : params_(std::move(params)), grid_(3, params_.grid_level) {
    params_.validate();
}

void CoupledSolver::step_backward(
    const std::vector<std::vector<double>>& next_values,
    const std::vector<std::vector<double>>& next_surpluses, double t,
    std::vector<std::vector<double>>& cur_values,
    std::vector<CoupledPolicySlice>* policy_out) const {
    const CoupledParams& p = params_;
    const int n_regimes = p.chain.n_regimes();
    const std::size_t n_pts = grid_.n_points();
    const double dt = p.dt;
    const double q_norm = p.seconds_per_day / p.reservoir_capacity;

    CoupledPolicySlice slice;
    if (policy_out) {
        slice.time = t;
        slice.q_index.assign(n_regimes, std::vector<int>(n_pts, -1));
        slice.replenish.assign(n_regimes,
                               std::vector<std::uint8_t>(n_pts, 0));
    }

    for (int i = 0; i < n_regimes; ++i) {
        const double q_in = p.chain.discharge(i);
        const std::vector<double>& surp = next_surpluses[i];
        std::vector<double>& cur = cur_values[i];
        // Sparse-grid interpolation is not monotone; off-node foot values are
        // clamped to the slice's nodal range, otherwise the minimization
        // harvests interpolation undershoots and they compound across the
        // backward steps. The clamp is inactive wherever the interpolant
        // stays within range.
        double lo = next_values[i][0], hi = lo;
        for (double v : next_values[i]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        auto interp = [&](const double* x) {
            return std::clamp(grid_.evaluate(surp, x), lo, hi);
        };
        for (std::size_t k = 0; k < n_pts; ++k) {
            const double x1 = grid_.coordinate(k, 0);
            const double x2 = grid_.coordinate(k, 1);
            const double x3 = grid_.coordinate(k, 2);
            const double f_run = coupled_running_cost(x1, x2, x3, p);
            const double alpha = coupled_detachment(x2, p);

            double best = std::numeric_limits<double>::infinity();
            int best_j = -1;
            for (const auto& [j, q] : coupled_admissible_discharges(x1, q_in, p)) {
                double foot[3];
                foot[0] = std::clamp(x1 + (q_in - q) * q_norm * dt, 0.0, 1.0);
                const double transport =
                    (x2 > 0.0) ? coupled_transport_rate(q, p) : 0.0;
                foot[1] = std::clamp(x2 - transport * dt, 0.0, 1.0);
                const double growth =
                    p.algae_r * x3 * (1.0 - x3 / p.algae_cap) - alpha * q * x3;
                foot[2] = std::clamp(x3 + growth * dt, 0.0, 1.0);

                const double dev = 1.0 - q / q_in;
                const double cand = interp(foot) + dt * (f_run + 0.5 * dev * dev);
                if (cand < best) {
                    best = cand;
                    best_j = j;
                }
            }

            // Regime coupling and the random intervention, both explicit from
            // the next time slice.
            double coupling = 0.0;
            for (const auto& [j, s] : p.chain.transitions(i)) {
                coupling += s * dt * (next_values[j][k] - next_values[i][k]);
            }
            const double keep = next_values[i][k];
            double total = best + coupling;
            std::uint8_t repl_flag = 0;
            if (p.intensity > 0.0) {
                const double at_full[3] = {x1, 1.0, x3};
                const double repl =
                    p.cost_prop * (1.0 - x2) + p.cost_fixed + interp(at_full);
                if (repl < keep) repl_flag = 1;
                total += p.intensity * dt * (std::min(repl, keep) - keep);
            }
            cur[k] = total / (1.0 + p.discount * dt);
            if (policy_out) {
                slice.q_index[i][k] = best_j;
                slice.replenish[i][k] = repl_flag;
            }
        }
    }
    if (policy_out) policy_out->push_back(std::move(slice));
}

CoupledSolution CoupledSolver::solve() const {
    const CoupledParams& p = params_;
    const int n_regimes = p.chain.n_regimes();
    const std::size_t n_pts = grid_.n_points();
    const long steps = std::max(1L, std::lround(p.horizon / p.dt));

    CoupledSolution sol;
    sol.grid = grid_;
    sol.min_nodal_value = 0.0;
    sol.min_backward_increment = std::numeric_limits<double>::infinity();

    // Which backward step stores which requested output time.
    std::vector<std::pair<long, double>> value_stores;   // step -> requested t
    std::vector<long> policy_stores;
    for (double tau : p.output_times) {
        const long k = std::clamp(std::lround((p.horizon - tau) / p.dt), 0L, steps);
        value_stores.emplace_back(k, tau);
        policy_stores.push_back(std::clamp(k, 1L, steps));
    }

    std::vector<std::vector<double>> v_next(n_regimes,
                                            std::vector<double>(n_pts, 0.0));
    std::vector<std::vector<double>> s_next(n_regimes,
                                            std::vector<double>(n_pts, 0.0));
    std::vector<std::vector<double>> v_cur = v_next;

    auto store_values = [&](long step, double t) {
        for (const auto& [k, tau] : value_stores) {
            if (k == step) {
                sol.times.push_back(t);
                sol.values.push_back(v_next);
                sol.surpluses.push_back(s_next);
                break;
            }
        }
    };

    store_values(0, p.horizon);  // terminal slice: identically zero
    for (long step = 1; step <= steps; ++step) {
        const double t = p.horizon - static_cast<double>(step) * p.dt;
        const bool want_policy =
            std::find(policy_stores.begin(), policy_stores.end(), step) !=
            policy_stores.end();
        std::vector<CoupledPolicySlice> pol;
        step_backward(v_next, s_next, t, v_cur, want_policy ? &pol : nullptr);

        // Cost-to-go cannot shrink with a longer remaining horizon (the costs
        // are nonnegative and the dynamics time-homogeneous); project the
        // iterate onto that constraint. The sparse interpolant is not
        // monotone, so raw steps undershoot near under-resolved layers by up
        // to the truncation error, which is exactly what this repairs.
        double min_val = std::numeric_limits<double>::infinity();
        double min_inc = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_regimes; ++i) {
            for (std::size_t k = 0; k < n_pts; ++k) {
                if (v_cur[i][k] < v_next[i][k]) {
                    sol.max_monotone_repair = std::max(
                        sol.max_monotone_repair, v_next[i][k] - v_cur[i][k]);
                    v_cur[i][k] = v_next[i][k];
                }
                min_val = std::min(min_val, v_cur[i][k]);
                min_inc = std::min(min_inc, v_cur[i][k] - v_next[i][k]);
            }
        }
        sol.min_nodal_value = std::min(sol.min_nodal_value, min_val);
        sol.min_backward_increment = std::min(sol.min_backward_increment, min_inc);

        v_next.swap(v_cur);
        for (int i = 0; i < n_regimes; ++i) {
            s_next[i] = grid_.hierarchize(v_next[i]);
        }
        if (want_policy) sol.policies.push_back(std::move(pol.front()));
        store_values(step, t);
    }
    return sol;
}

std::vector<CoupledPolicyRow> coupled_policy_slice(const CoupledSolution& sol,
                                                   const CoupledParams& p, double t,
                                                   int regime) {
    if (regime < 0 || regime >= p.chain.n_regimes()) {
        throw ConfigError("coupled_policy_slice: regime index out of range");
    }
    const CoupledPolicySlice* found = nullptr;
    for (const auto& s : sol.policies) {
        if (std::abs(s.time - t) <= 0.5 * p.dt) {
            found = &s;
            break;
        }
    }
    if (!found) {
        throw ConfigError("coupled_policy_slice: time " + std::to_string(t) +
                          " is not stored");
    }
    std::vector<CoupledPolicyRow> rows;
    rows.reserve(sol.grid.n_points());
    for (std::size_t k = 0; k < sol.grid.n_points(); ++k) {
        CoupledPolicyRow r;
        r.x1 = sol.grid.coordinate(k, 0);
        r.x2 = sol.grid.coordinate(k, 1);
        r.x3 = sol.grid.coordinate(k, 2);
        r.q_index = found->q_index[regime][k];
        r.q_value = p.a_coeffs[r.q_index] * p.chain.discharge(regime);
        r.replenish = found->replenish[regime][k];
        rows.push_back(r);
    }
    return rows;
}

EstimateReport coupled_mc_verify(const CoupledParams& p, const CoupledSolution& sol,
                                 const std::array<double, 3>& x0, int i0,
                                 int n_paths, std::uint64_t rng_seed) {
    const long steps = std::max(1L, std::lround(p.horizon / p.dt));
    const double q_norm = p.seconds_per_day / p.reservoir_capacity;
    const std::size_t n_pts = sol.grid.n_points();

    auto nearest_node = [&](const double* x) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_pts; ++k) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double g = sol.grid.coordinate(k, c) - x[c];
                d += g * g;
            }
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        return best;
    };
    auto nearest_slice = [&](double t) -> const CoupledPolicySlice& {
        const CoupledPolicySlice* best = &sol.policies.front();
        for (const auto& s : sol.policies) {
            if (std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
        }
        return *best;
    };
    if (sol.policies.empty()) {
        throw ConfigError("coupled_mc_verify: solution stores no policies");
    }

    std::vector<double> samples;
    samples.reserve(n_paths);
    for (int path = 0; path < n_paths; ++path) {
        Rng rng = substream(rng_seed, static_cast<std::uint64_t>(path));
        auto regime_path = sample_path(p.chain, i0, p.horizon, rng);
        auto chances = poisson_times(p.intensity, p.horizon, rng);

        CostAccumulator acc(p.discount);
        double event_costs = 0.0;
        double x[3] = {x0[0], x0[1], x0[2]};
        std::size_t seg = 0;
        std::size_t chance = 0;
        for (long step = 0; step < steps; ++step) {
            const double t = static_cast<double>(step) * p.dt;
            while (seg + 1 < regime_path.size() && regime_path[seg + 1].time <= t) {
                ++seg;
            }
            const int i = regime_path[seg].regime;
            const double q_in = p.chain.discharge(i);

            const CoupledPolicySlice& slice = nearest_slice(t);
            const std::size_t node = nearest_node(x);
            int j = slice.q_index[i][node];
            if (j < 0) j = 0;
            double q = p.a_coeffs[j] * q_in;
            // Respect the storage constraint along the simulated path.
            if (x[0] <= 0.0 && q > q_in) q = q_in;
            if (x[0] >= 1.0 && q < q_in) q = q_in;

            const double dev = 1.0 - q / q_in;
            const double rate =
                coupled_running_cost(x[0], x[1], x[2], p) + 0.5 * dev * dev;
            acc.add_segment(rate, p.dt);

            const double alpha = coupled_detachment(x[1], p);
            const double transport = (x[1] > 0.0) ? coupled_transport_rate(q, p) : 0.0;
            const double growth =
                p.algae_r * x[2] * (1.0 - x[2] / p.algae_cap) - alpha * q * x[2];
            x[0] = std::clamp(x[0] + (q_in - q) * q_norm * p.dt, 0.0, 1.0);
            x[1] = std::clamp(x[1] - transport * p.dt, 0.0, 1.0);
            x[2] = std::clamp(x[2] + growth * p.dt, 0.0, 1.0);

            while (chance < chances.size() && chances[chance] <= t + p.dt) {
                const std::size_t nd = nearest_node(x);
                if (x[1] < 1.0 && slice.replenish[i][nd]) {
                    event_costs += (p.cost_prop * (1.0 - x[1]) + p.cost_fixed) *
                                   std::exp(-p.discount * chances[chance]);
                    x[1] = 1.0;
                }
                ++chance;
            }
        }
        samples.push_back(acc.total() + event_costs);
    }
    return estimate(samples, rng_seed);
}

} // namespace riverdp
