#include "riverdp/fishery.hpp"

#include <algorithm>
#include <cmath>

#include "riverdp/errors.hpp"
#include "riverdp/rk4.hpp"
#include "riverdp/simulate.hpp"

namespace riverdp {

void FisheryParams::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("fishery: horizon must be > 0");
    if (!(net_mortality > 0.0)) throw ConfigError("fishery: net_mortality must be > 0");
    if (!(predation > 0.0)) throw ConfigError("fishery: predation must be > 0");
    if (!(h_max > 0.0)) throw ConfigError("fishery: h_max must be > 0");
    if (!(w1 > 0.0) || !(w2 > 0.0) || !(w3 > 0.0)) {
        throw ConfigError("fishery: weights w1, w2, w3 must be > 0");
    }
    if (!(dt > 0.0) || !(dt <= horizon / 10.0)) {
        throw ConfigError("fishery: dt must satisfy 0 < dt << horizon");
    }
}

FisheryControls bang_bang_controls(double psi, double weight,
                                   const FisheryParams& p) {
    FisheryControls c;
    c.h = (-p.w1 * weight - psi < 0.0) ? p.h_max : 0.0;
    c.u = (p.w2 * weight + psi < 0.0) ? 1.0 : 0.0;
    return c;
}

namespace {

// inf over (h, u) of { -(R + p(1-u) + h) psi - w1 h U + w2 p u U }, evaluated
// exactly: the objective is linear in each control separately.
double control_infimum(double psi, double weight, const FisheryParams& p) {
    const double base = -(p.net_mortality + p.predation) * psi;
    const double h_part = std::min(0.0, p.h_max * (-psi - p.w1 * weight));
    const double u_part = std::min(0.0, p.predation * (psi + p.w2 * weight));
    return base + h_part + u_part;
}

} // namespace

PsiSolution solve_psi(const FisheryParams& p) {
    p.validate();
    auto rhs = [&p](double t, double psi) {
        // -d(psi)/dt = inf{...}  =>  d(psi)/dt = -inf{...}
        return -control_infimum(psi, p.growth.weight_at(t), p);
    };
    const double terminal = -p.w3 * p.growth.weight_at(p.horizon);
    Trajectory traj = rk4_integrate_backward(rhs, terminal, p.horizon, 0.0, p.dt);

    PsiSolution s;
    const std::size_t n = traj.times.size();
    s.times.resize(n);
    s.psi.resize(n);
    s.h_star.resize(n);
    s.u_star.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = n - 1 - k;  // reverse to ascending time
        s.times[k] = traj.times[r];
        s.psi[k] = traj.values[r];
        const FisheryControls c =
            bang_bang_controls(s.psi[k], p.growth.weight_at(s.times[k]), p);
        s.h_star[k] = c.h;
        s.u_star[k] = c.u;
    }
    return s;
}

std::optional<double> detect_harvest_threshold(const PsiSolution& s) {
    const std::size_t n = s.h_star.size();
    if (n == 0) return std::nullopt;
    if (s.h_star[0] > 0.0) return std::nullopt;  // active from the start
    std::size_t switches = 0;
    std::size_t t0_index = 0;
    for (std::size_t k = 1; k < n; ++k) {
        if ((s.h_star[k] > 0.0) != (s.h_star[k - 1] > 0.0)) {
            ++switches;
            t0_index = k - 1;
        }
    }
    if (switches != 1) return std::nullopt;
    return s.times[t0_index];
}

double hjb_residual(const PsiSolution& s, const FisheryParams& p,
                    const std::vector<double>& test_x) {
    const std::size_t n = s.times.size();
    if (n < 3) throw ConfigError("hjb_residual: solution mesh too short");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dt = s.times[k + 1] - s.times[k - 1];
        const double dpsi_dt = (s.psi[k + 1] - s.psi[k - 1]) / dt;
        const double ode_res =
            -dpsi_dt - control_infimum(s.psi[k], p.growth.weight_at(s.times[k]), p);
        for (double x : test_x) {
            worst = std::max(worst, std::abs(ode_res * x));
        }
    }
    return worst;
}

PopulationPath simulate_population(const FisheryParams& p, const PsiSolution& s,
                                   double jump_intensity,
                                   const std::function<double(Rng&)>& jump_density,
                                   double x0, std::uint64_t rng_seed) {
    if (x0 < 0.0) throw ConfigError("simulate_population: x0 must be >= 0");
    Rng rng(rng_seed);
    std::vector<double> jumps = poisson_times(jump_intensity, p.horizon, rng);

    // Cumulative decay exponent D(t) = int_0^t (R + p(1-u) + h) ds with the
    // schedules piecewise constant per mesh cell.
    const std::size_t n = s.times.size();
    std::vector<double> decay(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double rate = p.net_mortality + p.predation * (1.0 - s.u_star[k - 1]) +
                            s.h_star[k - 1];
        decay[k] = decay[k - 1] + rate * (s.times[k] - s.times[k - 1]);
    }
    auto decay_at = [&](double t) {
        auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
        std::size_t k = static_cast<std::size_t>(it - s.times.begin());
        if (k == 0) return 0.0;
        --k;
        if (k >= n - 1) return decay[n - 1];
        const double rate = p.net_mortality + p.predation * (1.0 - s.u_star[k]) +
                            s.h_star[k];
        return decay[k] + rate * (t - s.times[k]);
    };

    PopulationPath path;
    auto emit = [&](double t, double x) {
        path.times.push_back(t);
        path.population.push_back(x);
    };

    double log_thinning = 0.0;  // log prod (1 - gamma_k) over past jumps
    std::size_t jump_idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.times[k];
        while (jump_idx < jumps.size() && jumps[jump_idx] <= t) {
            const double tj = jumps[jump_idx];
            emit(tj, x0 * std::exp(-decay_at(tj) + log_thinning));
            const double gamma = jump_density(rng);
            if (!(gamma > 0.0) || !(gamma < 1.0)) {
                throw ConfigError("simulate_population: jump size must be in (0, 1)");
            }
            log_thinning += std::log1p(-gamma);
            emit(tj, x0 * std::exp(-decay_at(tj) + log_thinning));
            ++jump_idx;
        }
        emit(t, x0 * std::exp(-decay_at(t) + log_thinning));
    }
    return path;
}

} // namespace riverdp
