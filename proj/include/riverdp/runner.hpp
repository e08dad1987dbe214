// Problem dispatch shared by the command-line tool and the tests: builds the
// solver inputs from a RunConfig, runs, and writes plot-ready outputs.
#ifndef RIVERDP_RUNNER_HPP
#define RIVERDP_RUNNER_HPP

#include <string>
#include <vector>

#include "riverdp/config.hpp"
#include "riverdp/regime.hpp"

namespace riverdp {

// Exit codes: 0 converged success, 2 convergence warning, 1 validation or
// runtime error (signalled by exceptions from the callee).
int run_problem(const RunConfig& rc);

// Independent instances of `key = value` for each value, run concurrently,
// with per-value outputs plus one combined long-format CSV. Failures are
// recorded and the sweep continues; the exit code reflects the worst instance.
int run_sweep(const ConfigMap& base_map, const std::string& key,
              const std::vector<double>& values, int workers);

// Monte Carlo verification of the configured problem; writes verify.json.
// An optional sediment policy CSV (columns w, omega) replaces the computed
// replenishment rule. Returns 0 on pass, 1 on fail.
int run_verify(const RunConfig& rc, const std::string& policy_file);

// Sparse grid dump (point index, levels, indices, coordinates).
int run_grid_dump(int dim, int level, const std::string& out_path);

RegimeChain make_reservoir_chain(const ReservoirConfig& rc);
RegimeChain make_coupled_chain(const CoupledConfig& cc);

} // namespace riverdp

#endif
