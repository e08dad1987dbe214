// Sediment replenishment under randomly arriving intervention chances.
// The storage decays deterministically (with the depletion indicator
// regularized), replenishment to full is possible only at Poisson event
// times, and the stationary equation is solved by semi-Lagrangian value
// iteration with WENO3 interpolation at the foot points.
#ifndef RIVERDP_SEDIMENT_HPP
#define RIVERDP_SEDIMENT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "riverdp/grid.hpp"
#include "riverdp/simulate.hpp"

namespace riverdp {

struct SedimentParams {
    double transport = 0.1;    // S, normalized storage per unit time
    double intensity = 0.1;    // lambda, 1/time
    double cost_prop = 0.5;    // c
    double cost_fixed = 0.4;   // d
    double discount = 0.1;     // delta
    double epsilon = 0.01;     // regularization, in (0, 1)

    void validate() const;
};

// Regularized depletion indicator max{0, 1 - w/eps}.
inline double chi_eps(double w, double eps) {
    return std::max(0.0, 1.0 - w / eps);
}

struct InterventionChoice {
    double best_value;
    int replenish;  // 0 or 1
};

struct SedimentSolution {
    UniformGrid1D grid{0.0, 1.0, 2};
    std::vector<double> value;
    std::vector<int> replenish;            // omega per node
    std::optional<double> threshold;       // largest omega = 1 node, if a step
    int iterations = 0;
    bool converged = false;
};

// Do nothing vs. replenish to full: min{ Phi(w), c (1-w) + d + Phi(1) }.
// Ties resolve to no replenishment; at w = 1 only doing nothing is admissible.
InterventionChoice sediment_intervention_value(const std::vector<double>& value,
                                               const UniformGrid1D& grid, double w,
                                               double cost_prop, double cost_fixed);

SedimentSolution sediment_solve_value_iteration(const SedimentParams& p, double dx,
                                                double dt, double tolerance,
                                                int max_iterations);

// Largest node with omega = 1 when omega is a single nonincreasing step;
// empty when omega is identically 0 or not of threshold type.
std::optional<double> sediment_extract_threshold(const std::vector<int>& replenish,
                                                 const UniformGrid1D& grid);

struct EpsilonSweepResult {
    std::vector<double> epsilons;
    std::vector<SedimentSolution> solutions;
    std::vector<double> sup_distances;  // between consecutive epsilon pairs
};

EpsilonSweepResult sediment_epsilon_sweep(SedimentParams p,
                                          const std::vector<double>& eps_list,
                                          double dx, double dt, double tolerance,
                                          int max_iterations);

// Monte Carlo verification: exact piecewise decay of the regularized dynamics
// between Poisson intervention chances, threshold policy from the solution,
// closed-form discounted accumulation of the depletion penalty.
EstimateReport sediment_mc_verify(const SedimentParams& p,
                                  const SedimentSolution& sol, double w0,
                                  double horizon, int n_paths,
                                  std::uint64_t rng_seed);

} // namespace riverdp

#endif
