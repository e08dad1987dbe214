// Stationary cost-efficient control of benthic algae growth with a
// discharge-dependent carrying capacity. A monotone upwind finite-difference
// discretization is solved by policy iteration: pointwise improvement via the
// cubic first-order condition, evaluation via tridiagonal solves.
#ifndef RIVERDP_ALGAE_HPP
#define RIVERDP_ALGAE_HPP

#include <vector>

#include "riverdp/grid.hpp"

namespace riverdp {

enum class AlgaeScheme {
    kUpwind,       // fully upwind first-order discretization of the drift
    kExponential,  // exponentially fitted transport along the frozen drift
};

struct AlgaeParams {
    double growth_rate = 1.0;   // r, 1/time
    double capacity_k0 = 0.4;
    double capacity_k1 = 0.3;   // K(q) = K0 + K1 q
    double detachment = 0.5;    // alpha
    double discount = 2.0;      // delta
    double q_min = 0.1;
    double q_max = 2.0;
    double q_target = 1.0;      // q_hat
    double weight_a = 0.1;      // a
    double cost_exponent = 0.5; // m
    AlgaeScheme scheme = AlgaeScheme::kUpwind;

    void validate() const;
    double domain_upper() const { return capacity_k0 + capacity_k1 * q_max; }
    double capacity(double q) const { return capacity_k0 + capacity_k1 * q; }
};

struct AlgaePolicySolution {
    UniformGrid1D grid{0.0, 1.0, 2};
    std::vector<double> value;
    std::vector<double> policy;  // q* per node
    int iterations = 0;
    bool converged = false;
};

struct AlgaeMinimum {
    double min_value;
    double q_star;
    bool used_fallback = false;  // dense sampling used after a cubic failure
};

// Drift r z (1 - z / K(q)) - alpha q z.
double algae_drift(double z, double q, const AlgaeParams& p);

// Exact minimization over q in [q_min, q_max] of
//   drift(z, q) dphi + (a/2)(q - q_hat)^2 + z^m.
// Candidates are the real roots of the cubic first-order condition plus the
// interval endpoints; ties break toward the candidate nearest q_hat.
AlgaeMinimum algae_inner_minimize(double z, double dphi, const AlgaeParams& p);

AlgaePolicySolution algae_solve_policy_iteration(const AlgaeParams& p, int n_nodes,
                                                 double tolerance,
                                                 int max_iterations);

// Per-solution maximum jump of q* across adjacent nodes; used to classify
// discontinuous vs. continuous policies across a weight sweep.
double algae_policy_transition_metric(const AlgaePolicySolution& s);

} // namespace riverdp

#endif
