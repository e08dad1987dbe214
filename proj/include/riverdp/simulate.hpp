// Monte Carlo verification machinery shared by the solvers: Poisson event
// streams, exact discounted-cost accumulation, and estimate reporting.
#ifndef RIVERDP_SIMULATE_HPP
#define RIVERDP_SIMULATE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "riverdp/errors.hpp"
#include "riverdp/rng.hpp"

namespace riverdp {

// Sorted jump times of a Poisson process with intensity rate on [0, horizon].
inline std::vector<double> poisson_times(double rate, double horizon, Rng& rng) {
    std::vector<double> times;
    if (rate <= 0.0) return times;
    double t = rng.exponential(rate);
    while (t < horizon) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
    return times;
}

// Accumulates int rho(s) e^{-delta s} ds for piecewise-constant rates plus
// discounted point costs. Each segment integrates in closed form, so no
// time-stepping bias enters the verification estimates.
class CostAccumulator {
public:
    explicit CostAccumulator(double discount) : delta_(discount) {}

    double time() const { return t_; }
    double total() const { return sum_; }

    // Advance time by h while accruing cost at constant rate rho.
    void add_segment(double rho, double h) {
        if (h < 0.0) throw ConfigError("CostAccumulator: negative duration");
        if (delta_ > 0.0) {
            sum_ += rho * (std::exp(-delta_ * t_) - std::exp(-delta_ * (t_ + h))) / delta_;
        } else {
            sum_ += rho * h * std::exp(-delta_ * t_);
        }
        t_ += h;
    }

    // A lump cost incurred at the current time.
    void add_event(double cost) { sum_ += cost * std::exp(-delta_ * t_); }

private:
    double delta_;
    double t_ = 0.0;
    double sum_ = 0.0;
};

struct EstimateReport {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

inline EstimateReport estimate(const std::vector<double>& samples,
                               std::uint64_t seed = 0) {
    if (samples.size() < 2) {
        throw ConfigError("estimate: need at least 2 samples");
    }
    EstimateReport r;
    r.n_paths = samples.size();
    r.seed = seed;
    double sum = 0.0;
    for (double s : samples) sum += s;
    r.mean = sum / static_cast<double>(samples.size());
    double ss = 0.0;
    for (double s : samples) ss += (s - r.mean) * (s - r.mean);
    const double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    r.std_error = sd / std::sqrt(static_cast<double>(samples.size()));
    return r;
}

} // namespace riverdp

#endif
