// Finite-horizon control of the coupled reservoir / sediment / algae system
// under regime-switching inflow. The three continuous states live on a shared
// sparse grid over [0,1]^3; one backward semi-Lagrangian step traces each
// state along the discharge-dependent drift, interpolates the next time
// slice, minimizes over the discrete discharge menu, and applies the regime
// and intervention couplings explicitly.
#ifndef RIVERDP_COUPLED_HPP
#define RIVERDP_COUPLED_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "riverdp/regime.hpp"
#include "riverdp/simulate.hpp"
#include "riverdp/sparse_grid.hpp"

namespace riverdp {

struct CoupledParams {
    RegimeChain chain;
    double reservoir_capacity = 6e7;   // m^3, normalizes x1
    double sediment_capacity = 200.0;  // m^3, normalizes x2 and the transport rate
    double trans_a = 3.82e4;           // transport constants of S(q)
    double trans_b = 1.31e-2;
    double trans_c = 4.7e-2;
    double alpha0 = 0.1;               // detachment alpha(x2) = alpha0 x2^m
    double alpha_m = 0.5;
    double algae_r = 0.5;              // 1/day
    double algae_cap = 1.0;            // K (constant capacity)
    double x1_hi = 0.8, x1_lo = 0.2;   // safe-region thresholds of the running cost
    double x2_lo = 0.2, x3_hi = 0.8;
    double cost_power = 3.0;           // p
    std::vector<double> a_coeffs = {0.0, 0.5, 2.0, 1.0 / 3.0, 3.0};
    double cost_prop = 0.15;           // c
    double cost_fixed = 0.05;          // d
    double intensity = 0.1;            // lambda, 1/day
    double discount = 0.0;             // delta, 1/day
    double horizon = 60.0;             // T, day
    double dt = 0.05;                  // day
    int grid_level = 7;
    std::vector<double> output_times = {0.0, 30.0, 60.0};
    double seconds_per_day = 86400.0;

    explicit CoupledParams(RegimeChain c) : chain(std::move(c)) {}
    void validate() const;
};

// Sediment transport rate (normalized storage per day) as a function of the
// outflow discharge q (m^3/s).
double coupled_transport_rate(double q, const CoupledParams& p);

// Detachment coefficient alpha0 x2^m for normalized sediment storage x2.
double coupled_detachment(double x2, const CoupledParams& p);

// Safe-region deviation penalty (1/day).
double coupled_running_cost(double x1, double x2, double x3, const CoupledParams& p);

// Discharge menu {a_j Q_i} filtered by the storage constraint: multipliers
// a_j <= 1 at x1 = 0, a_j >= 1 at x1 = 1. Returns (menu index, q in m^3/s).
std::vector<std::pair<int, double>> coupled_admissible_discharges(
    double x1, double q_inflow, const CoupledParams& p);

struct CoupledPolicySlice {
    double time = 0.0;
    // Per regime, per grid point.
    std::vector<std::vector<int>> q_index;
    std::vector<std::vector<std::uint8_t>> replenish;
};

struct CoupledSolution {
    SparseGrid grid{3, 3};
    std::vector<double> times;  // stored value times, descending from T
    // values[t][regime] are nodal arrays; surpluses[t][regime] hierarchical.
    std::vector<std::vector<std::vector<double>>> values;
    std::vector<std::vector<std::vector<double>>> surpluses;
    std::vector<CoupledPolicySlice> policies;  // at requested output times
    double min_nodal_value = 0.0;              // over all regimes and steps
    double min_backward_increment = 0.0;       // min over steps of min(V_t - V_{t+dt})
    // Largest monotone repair applied: the exact value is nondecreasing in the
    // remaining horizon, so iterates are projected onto that constraint; the
    // repair size is bounded by the interpolation truncation error and is
    // reported for transparency.
    double max_monotone_repair = 0.0;
};

class CoupledSolver {
public:
    explicit CoupledSolver(CoupledParams params);

    const SparseGrid& grid() const { return grid_; }
    const CoupledParams& params() const { return params_; }

    // One backward step from time t + dt to t. next_values/next_surpluses are
    // per-regime arrays on the shared grid; outputs have the same layout.
    void step_backward(const std::vector<std::vector<double>>& next_values,
                       const std::vector<std::vector<double>>& next_surpluses,
                       double t, std::vector<std::vector<double>>& cur_values,
                       std::vector<CoupledPolicySlice>* policy_out) const;

    CoupledSolution solve() const;

private:
    CoupledParams params_;
    SparseGrid grid_;
};

// Policy rows for a stored (time, regime) pair; throws on unknown time/regime.
struct CoupledPolicyRow {
    double x1, x2, x3;
    int q_index;
    double q_value;  // m^3/s
    int replenish;
};
std::vector<CoupledPolicyRow> coupled_policy_slice(const CoupledSolution& sol,
                                                   const CoupledParams& p, double t,
                                                   int regime);

// Monte Carlo verification of the value at (t = 0, i0, x0): Euler steps of
// the dynamics, regime jumps, Poisson intervention chances, policies read
// from the nearest stored slice at the nearest grid node.
EstimateReport coupled_mc_verify(const CoupledParams& p, const CoupledSolution& sol,
                                 const std::array<double, 3>& x0, int i0,
                                 int n_paths, std::uint64_t rng_seed);

} // namespace riverdp

#endif
