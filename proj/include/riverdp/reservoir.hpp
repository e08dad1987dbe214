// Stationary regime-coupled reservoir operation. The value of each inflow
// regime solves a coupled first-order equation on the normalized storage
// y in [0, 1]; the discretization is local Lax-Friedrichs with WENO5 biased
// derivatives, solved by Gauss-Seidel fast sweeping in alternating node
// orders. State constraints enter through the admissible discharge set at
// the boundary nodes.
#ifndef RIVERDP_RESERVOIR_HPP
#define RIVERDP_RESERVOIR_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "riverdp/grid.hpp"
#include "riverdp/regime.hpp"
#include "riverdp/simulate.hpp"

namespace riverdp {

struct ReservoirParams {
    RegimeChain chain;
    double capacity = 6e7;            // m^3
    double q_min = 1.0;               // m^3/s
    double q_max = 200.0;             // m^3/s
    double discount = 0.01;           // 1/day
    double env_flow = 10.0;           // q_hat, m^3/s
    double weight_a = 0.2;
    double penalty_scale = 5.0;       // f(y) = scale [(0.2-y)_+^2 + (y-0.8)_+^2]
    double seconds_per_day = 86400.0;
    // Optional override of the volume penalty (normalized y -> cost rate).
    std::function<double(double)> volume_penalty;

    explicit ReservoirParams(RegimeChain c) : chain(std::move(c)) {}

    void validate() const;
    // Internal computation normalizes volumes by capacity and discharges by
    // capacity / seconds_per_day.
    double normalize_q(double q_m3s) const {
        return q_m3s * seconds_per_day / capacity;
    }
    double penalty(double y) const {
        if (volume_penalty) return volume_penalty(y);
        const double lo = std::max(0.2 - y, 0.0);
        const double hi = std::max(y - 0.8, 0.0);
        return penalty_scale * (lo * lo + hi * hi);
    }
};

// Admissible discharge interval (m^3/s): [q_min, q_max] in the interior,
// [q_min, Q_i] at y = 0, [Q_i, q_max] at y = 1.
std::pair<double, double> reservoir_admissible_interval(double y, double q_inflow,
                                                        const ReservoirParams& p);

struct HamiltonianMin {
    double min_value;
    double q_star;
};

// Exact minimum over q in [q_lo, q_hi] of
//   (q_inflow - q) dphi + (q - q_inflow)^2 / 2 + (a/2)(q_hat - q)_+^2 + f_val.
// Works in any consistent units; ties resolve to the smallest q.
HamiltonianMin reservoir_hamiltonian_min(double dphi, double q_inflow, double q_lo,
                                         double q_hi, double q_hat, double a,
                                         double f_val);

struct StationaryValue {
    UniformGrid1D grid{0.0, 1.0, 2};
    int n_regimes = 0;
    std::vector<double> values;   // [regime][node], row-major
    std::vector<double> policy;   // q* normalized by Q(i)
    int iterations = 0;
    std::vector<double> residual_history;  // sup-norm change per sweep
    bool converged = false;

    double value(int i, int k) const { return values[static_cast<std::size_t>(i) * grid.n_nodes() + k]; }
    double policy_at(int i, int k) const { return policy[static_cast<std::size_t>(i) * grid.n_nodes() + k]; }
};

StationaryValue reservoir_solve_stationary(const ReservoirParams& p, int n_nodes,
                                           double tolerance, int max_sweeps);

// Max residual of the discrete stationary equation over interior nodes.
double reservoir_discrete_residual(const ReservoirParams& p, const StationaryValue& v);

namespace detail {

// First-order Lax-Friedrichs nodal update (the monotone core of the sweep):
// returns the new nodal value from the two spatial neighbors, the coupling
// sum over other regimes, and frozen high-order corrections r_minus/r_plus.
double reservoir_nodal_update(double phi_left, double phi_right, double h,
                              double coupling_sum, double exit_rate, double sigma,
                              double r_minus, double r_plus, double q_inflow_n,
                              double q_lo_n, double q_hi_n, double q_hat_n, double a,
                              double f_val, double discount);

} // namespace detail

// Simulates the controlled storage under the computed policy (interpolated
// linearly in y) and accumulates the discounted running cost.
EstimateReport reservoir_mc_verify(const ReservoirParams& p, const StationaryValue& v,
                                   double y0, int i0, double horizon, int n_paths,
                                   std::uint64_t rng_seed);

} // namespace riverdp

#endif
