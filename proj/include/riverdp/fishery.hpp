// Finite-horizon harvesting/protection schedule for a non-renewable fish
// population. The value function is linear in the population, so the dynamic
// programming equation reduces to a scalar ODE for its slope psi(t), which is
// integrated backward in time; both controls are bang-bang.
#ifndef RIVERDP_FISHERY_HPP
#define RIVERDP_FISHERY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "riverdp/growth.hpp"
#include "riverdp/rng.hpp"

namespace riverdp {

struct FisheryParams {
    double horizon = 150.0;        // T, day
    double net_mortality = 0.01;   // R, 1/day (catastrophic losses folded in)
    double predation = 0.01;       // p, 1/day
    double h_max = 0.02;           // 1/day
    double w1 = 3.0;               // harvest utility weight
    double w2 = 2.0;               // protection cost weight
    double w3 = 1.0;               // terminal biomass weight
    GrowthCurve growth{0.045, 90.0, 6.0};
    double dt = 0.01;              // day

    void validate() const;
};

struct PsiSolution {
    std::vector<double> times;   // ascending, times[0] = 0, back() = T
    std::vector<double> psi;     // value per unit population
    std::vector<double> h_star;  // in {0, h_max}
    std::vector<double> u_star;  // in {0, 1}
};

struct FisheryControls {
    double h;
    double u;
};

// Pointwise minimizers of the two linear control terms; ties resolve to the
// inactive control (h = 0, u = 0).
FisheryControls bang_bang_controls(double psi, double weight, const FisheryParams& p);

// Integrates psi backward from psi(T) = -w3 U_T by RK4 with the infimum
// evaluated exactly from the bang-bang structure.
PsiSolution solve_psi(const FisheryParams& p);

// Start time of the single harvest switch: h = 0 on [0, T0], h_max after.
// Empty if h never switches or switches more than once or starts active.
std::optional<double> detect_harvest_threshold(const PsiSolution& s);

// Max absolute residual of the dynamic programming equation under
// Phi(t, x) = psi(t) x, with d(psi)/dt by centered differences on the mesh,
// over interior mesh times and the given population test points.
double hjb_residual(const PsiSolution& s, const FisheryParams& p,
                    const std::vector<double>& test_x);

struct PopulationPath {
    std::vector<double> times;
    std::vector<double> population;
};

// Simulates the controlled population with catastrophic Poisson losses:
// exact exponential decay between jumps, X <- (1 - gamma) X at each jump.
// Controls are read from the solved schedules.
PopulationPath simulate_population(const FisheryParams& p, const PsiSolution& s,
                                   double jump_intensity,
                                   const std::function<double(Rng&)>& jump_density,
                                   double x0, std::uint64_t rng_seed);

} // namespace riverdp

#endif
