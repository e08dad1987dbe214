#include "riverdp/sediment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riverdp/errors.hpp"
#include "riverdp/weno.hpp"

namespace riverdp {

void SedimentParams::validate() const {
    if (!(transport > 0.0)) throw ConfigError("sediment: transport must be > 0");
    if (intensity < 0.0) throw ConfigError("sediment: intensity must be >= 0");
    if (!(cost_prop > 0.0) || !(cost_fixed > 0.0)) {
        throw ConfigError("sediment: costs c, d must be > 0");
    }
    if (!(discount > 0.0)) throw ConfigError("sediment: discount must be > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("sediment: epsilon must be in (0, 1)");
    }
}

InterventionChoice sediment_intervention_value(const std::vector<double>& value,
                                               const UniformGrid1D& grid, double w,
                                               double cost_prop, double cost_fixed) {
    const double keep = weno3_interpolate(value, grid, w);
    if (w >= 1.0) return {keep, 0};
    const double full = cost_prop * (1.0 - w) + cost_fixed + value.back();
    if (full < keep) return {full, 1};
    return {keep, 0};
}

SedimentSolution sediment_solve_value_iteration(const SedimentParams& p, double dx,
                                                double dt, double tolerance,
                                                int max_iterations) {
    p.validate();
    if (!(dx > 0.0) || !(dt > 0.0)) {
        throw ConfigError("sediment: dx and dt must be > 0");
    }
    const int n = static_cast<int>(std::lround(1.0 / dx)) + 1;
    if (n < 7) throw ConfigError("sediment: grid too coarse for WENO3");

    SedimentSolution s;
    s.grid = UniformGrid1D(0.0, 1.0, n);
    s.value.assign(n, 0.0);
    s.replenish.assign(n, 0);

    const double denom = 1.0 + (p.discount + p.intensity) * dt;
    std::vector<double> next(n, 0.0);
    double prev_change = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int it = 1; it <= max_iterations; ++it) {
        const double phi_full = s.value[n - 1];
        for (int k = 0; k < n; ++k) {
            const double w = s.grid.node(k);
            const double chi = chi_eps(w, p.epsilon);
            const double foot =
                std::clamp(w - p.transport * (1.0 - chi) * dt, 0.0, 1.0);
            const double transported = weno3_interpolate(s.value, s.grid, foot);
            const double keep = s.value[k];
            const double repl = p.cost_prop * (1.0 - w) + p.cost_fixed + phi_full;
            const double best = (k < n - 1 && repl < keep) ? repl : keep;
            next[k] = (transported + dt * (chi + p.intensity * best)) / denom;
        }
        double change = 0.0;
        for (int k = 0; k < n; ++k) {
            change = std::max(change, std::abs(next[k] - s.value[k]));
        }
        s.value.swap(next);
        s.iterations = it;
        if (change <= tolerance) {
            s.converged = true;
            break;
        }
        growth_streak = (change > prev_change) ? growth_streak + 1 : 0;
        if (growth_streak >= 100) {
            throw NumericError("sediment: value iteration diverging (" +
                               std::to_string(growth_streak) +
                               " consecutive growing updates)");
        }
        prev_change = change;
    }

    const double phi_full = s.value[n - 1];
    for (int k = 0; k < n; ++k) {
        const double w = s.grid.node(k);
        const double repl = p.cost_prop * (1.0 - w) + p.cost_fixed + phi_full;
        s.replenish[k] = (k < n - 1 && repl < s.value[k]) ? 1 : 0;
    }
    s.threshold = sediment_extract_threshold(s.replenish, s.grid);
    return s;
}

std::optional<double> sediment_extract_threshold(const std::vector<int>& replenish,
                                                 const UniformGrid1D& grid) {
    int last_one = -1;
    for (int k = 0; k < static_cast<int>(replenish.size()); ++k) {
        if (replenish[k] == 1) last_one = k;
    }
    if (last_one < 0) return std::nullopt;  // never replenish
    for (int k = 0; k <= last_one; ++k) {
        if (replenish[k] != 1) return std::nullopt;  // not a single step
    }
    return grid.node(last_one);
}

EpsilonSweepResult sediment_epsilon_sweep(SedimentParams p,
                                          const std::vector<double>& eps_list,
                                          double dx, double dt, double tolerance,
                                          int max_iterations) {
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) {
            throw ConfigError("sediment sweep: epsilon list must be sorted descending");
        }
    }
    EpsilonSweepResult r;
    for (double eps : eps_list) {
        p.epsilon = eps;
        r.epsilons.push_back(eps);
        r.solutions.push_back(
            sediment_solve_value_iteration(p, dx, dt, tolerance, max_iterations));
    }
    for (std::size_t i = 1; i < r.solutions.size(); ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < r.solutions[i].value.size(); ++k) {
            d = std::max(d, std::abs(r.solutions[i].value[k] -
                                     r.solutions[i - 1].value[k]));
        }
        r.sup_distances.push_back(d);
    }
    return r;
}

namespace {

// int_0^h e^{-delta(t0+t)} chi_eps(W(t)) dt for the exponential-decay phase
// starting at W0 <= eps, where W(t) = W0 e^{-(S/eps) t}.
double depletion_cost(double w0, double t0, double h, const SedimentParams& p) {
    const double rate = p.transport / p.epsilon;
    const double a = (1.0 - std::exp(-p.discount * h)) / p.discount;
    const double b =
        (w0 / p.epsilon) * (1.0 - std::exp(-(p.discount + rate) * h)) / (p.discount + rate);
    return std::exp(-p.discount * t0) * (a - b);
}

} // namespace

EstimateReport sediment_mc_verify(const SedimentParams& p,
                                  const SedimentSolution& sol, double w0,
                                  double horizon, int n_paths,
                                  std::uint64_t rng_seed) {
    if (!(std::exp(-p.discount * horizon) <= 0.01)) {
        throw ConfigError("sediment_mc_verify: horizon too short for truncation bound");
    }
    const int n = sol.grid.n_nodes();
    auto replenish_at = [&](double w) {
        int k = static_cast<int>(std::lround(w / sol.grid.spacing()));
        k = std::clamp(k, 0, n - 1);
        return sol.replenish[k] == 1;
    };

    std::vector<double> samples;
    samples.reserve(n_paths);
    for (int path = 0; path < n_paths; ++path) {
        Rng rng = substream(rng_seed, static_cast<std::uint64_t>(path));
        std::vector<double> events = poisson_times(p.intensity, horizon, rng);
        events.push_back(horizon);

        double cost = 0.0;
        double t = 0.0;
        double w = w0;
        for (double te : events) {
            double remaining = te - t;
            if (w > p.epsilon) {
                // Linear decay at rate S until the regularized zone; no penalty.
                const double t_cross = (w - p.epsilon) / p.transport;
                if (t_cross >= remaining) {
                    w -= p.transport * remaining;
                    t = te;
                    remaining = 0.0;
                } else {
                    w = p.epsilon;
                    t += t_cross;
                    remaining -= t_cross;
                }
            }
            if (remaining > 0.0) {
                cost += depletion_cost(w, t, remaining, p);
                w *= std::exp(-(p.transport / p.epsilon) * remaining);
                t = te;
            }
            if (te < horizon && w < 1.0 && replenish_at(w)) {
                cost += (p.cost_prop * (1.0 - w) + p.cost_fixed) * std::exp(-p.discount * t);
                w = 1.0;
            }
        }
        samples.push_back(cost);
    }
    return estimate(samples, rng_seed);
}

} // namespace riverdp
