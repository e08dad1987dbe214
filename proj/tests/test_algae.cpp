#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "riverdp/algae.hpp"
#include "riverdp/rng.hpp"

using namespace riverdp;

namespace {

AlgaeParams paper_params() { return AlgaeParams{}; }

double brute_force_min(double z, double dphi, const AlgaeParams& p, int samples,
                       double* argmin = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double q = p.q_min + (p.q_max - p.q_min) * i / samples;
        const double v = algae_drift(z, q, p) * dphi +
                         0.5 * p.weight_a * (q - p.q_target) * (q - p.q_target) +
                         std::pow(z, p.cost_exponent);
        if (v < best) {
            best = v;
            if (argmin) *argmin = q;
        }
    }
    return best;
}

} // namespace

TEST_CASE("drift fixed points") {
    AlgaeParams p = paper_params();
    CHECK(algae_drift(0.0, 1.5, p) == 0.0);
    const double q = 1.0;
    const double k = p.capacity(q);
    CHECK(algae_drift(k, q, p) == doctest::Approx(-p.detachment * q * k));
    CHECK(algae_drift(0.5, 1.0, p) == doctest::Approx(-0.107143).epsilon(1e-4));
}

TEST_CASE("inner minimize at extinction returns the target discharge") {
    AlgaeParams p = paper_params();
    auto m = algae_inner_minimize(0.0, 0.37, p);
    CHECK(m.q_star == doctest::Approx(p.q_target));
    CHECK(m.min_value == doctest::Approx(0.0));
}

TEST_CASE("control-independent capacity gives the linear closed form") {
    AlgaeParams p = paper_params();
    p.capacity_k0 = 1.0;
    p.capacity_k1 = 0.0;
    for (double z : {0.1, 0.4, 0.9}) {
        for (double dphi : {-2.0, -0.3, 0.0, 0.4, 3.0}) {
            const double expect =
                std::clamp(p.q_target + p.detachment * z * dphi / p.weight_a,
                           p.q_min, p.q_max);
            auto m = algae_inner_minimize(z, dphi, p);
            CHECK(m.q_star == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("inner minimize matches brute-force sampling") {
    AlgaeParams p = paper_params();
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const double z = rng.uniform(0.0, 1.0);
        const double dphi = rng.uniform(-5.0, 5.0);
        p.weight_a = rng.uniform(0.05, 3.0);
        auto m = algae_inner_minimize(z, dphi, p);
        const double ref = brute_force_min(z, dphi, p, 100000);
        CHECK(m.min_value <= ref + 1e-8);
        CHECK(m.min_value >= ref - 1e-8);
    }
}

TEST_CASE("policy iteration on the paper configuration") {
    AlgaeParams p = paper_params();
    auto s = algae_solve_policy_iteration(p, 501, 1e-14, 50);
    CHECK(s.converged);
    CHECK(s.iterations <= 5);
    CHECK(s.value[0] == doctest::Approx(0.0).epsilon(1e-12));
    for (int k = 0; k < 501; ++k) {
        CHECK(s.value[k] >= -1e-12);
        CHECK(s.policy[k] >= p.q_min);
        CHECK(s.policy[k] <= p.q_max);
    }
    // Value nondecreasing in the algae burden.
    for (int k = 1; k < 501; ++k) CHECK(s.value[k] >= s.value[k - 1] - 1e-10);
    // Concavity of the computed profile.
    const double h = s.grid.spacing();
    for (int k = 1; k < 500; ++k) {
        const double second =
            (s.value[k + 1] - 2.0 * s.value[k] + s.value[k - 1]) / (h * h);
        CHECK(second <= 1e-8);
    }
}

TEST_CASE("zero running cost gives zero value and target policy") {
    AlgaeParams p = paper_params();
    // z^m with huge m vanishes on (0,1); drive the cost to zero via weight too.
    p.cost_exponent = 1.0;
    auto cost_free = [](const AlgaeParams& params, int n) {
        AlgaeParams q = params;
        q.cost_exponent = 50.0;  // z^50 ~ 0 except the last node
        return algae_solve_policy_iteration(q, n, 1e-13, 60);
    };
    auto s = cost_free(p, 101);
    CHECK(s.converged);
    for (int k = 0; k < 100; ++k) {
        CHECK(s.value[k] <= 0.51);  // bounded by sup cost / discount
    }
    CHECK(s.policy[0] == doctest::Approx(p.q_target));
}

TEST_CASE("myopic limit at a large discount") {
    AlgaeParams p = paper_params();
    p.discount = 1000.0;
    auto s = algae_solve_policy_iteration(p, 201, 1e-14, 60);
    CHECK(s.converged);
    for (int k = 1; k < 201; ++k) {
        const double z = s.grid.node(k);
        const double myopic = std::pow(z, p.cost_exponent) / p.discount;
        CHECK(std::abs(s.value[k] - myopic) <= 0.05 * myopic);
    }
}

TEST_CASE("residual is nonincreasing across policy iterations") {
    // Rather than instrumenting the solver, run it with increasing iteration
    // caps and check the value error against the converged solution shrinks.
    AlgaeParams p = paper_params();
    auto full = algae_solve_policy_iteration(p, 301, 1e-14, 50);
    REQUIRE(full.converged);
    double prev = std::numeric_limits<double>::infinity();
    for (int cap = 1; cap <= full.iterations; ++cap) {
        auto s = algae_solve_policy_iteration(p, 301, 0.0, cap);
        double gap = 0.0;
        for (int k = 0; k < 301; ++k) {
            gap = std::max(gap, std::abs(s.value[k] - full.value[k]));
        }
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
}

TEST_CASE("policy transition metric reports the largest adjacent jump") {
    AlgaePolicySolution s;
    s.grid = UniformGrid1D(0.0, 1.0, 5);
    s.policy = {1.0, 1.1, 0.4, 0.45, 0.5};
    CHECK(algae_policy_transition_metric(s) == doctest::Approx(0.7));
    s.policy = {1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(algae_policy_transition_metric(s) == 0.0);
}

TEST_CASE("control-independent capacity keeps the policy continuous") {
    // The classification thresholds of the weight sweep live in the
    // acceptance suite; here only the robust half is asserted.
    AlgaeParams p = paper_params();
    p.capacity_k0 = 1.0;
    p.capacity_k1 = 0.0;
    for (double a : {0.25, 0.5, 1.0, 2.5}) {
        p.weight_a = a;
        auto s = algae_solve_policy_iteration(p, 501, 1e-14, 50);
        REQUIRE(s.converged);
        CHECK(algae_policy_transition_metric(s) < 0.05);
    }
}

TEST_CASE("exponential-fit variant stays close to the upwind scheme") {
    AlgaeParams p = paper_params();
    auto up = algae_solve_policy_iteration(p, 401, 1e-13, 50);
    p.scheme = AlgaeScheme::kExponential;
    auto ex = algae_solve_policy_iteration(p, 401, 1e-13, 50);
    REQUIRE(up.converged);
    REQUIRE(ex.converged);
    double gap = 0.0;
    for (int k = 0; k < 401; ++k) {
        gap = std::max(gap, std::abs(up.value[k] - ex.value[k]));
    }
    // Both are first-order consistent discretizations of the same equation.
    CHECK(gap < 0.02);
}
