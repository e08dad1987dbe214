// Sectioned key = value configuration files with strict key checking.
//
//   [run]
//   problem = sediment      # fishery | reservoir | algae | sediment | coupled
//   seed = 1
//
//   [sediment]
//   epsilon = 0.01
//   ...
//
// Unknown keys are rejected; every value is validated when the typed
// configuration is built. Overrides use dotted names: section.key=value.
#ifndef RIVERDP_CONFIG_HPP
#define RIVERDP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "riverdp/errors.hpp"

namespace riverdp {

class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text);

    void set(const std::string& section, const std::string& key,
             const std::string& value);
    // "section.key=value" as given on a command line.
    void apply_override(const std::string& assignment);

    bool has(const std::string& section, const std::string& key) const;
    std::string take_string(const std::string& section, const std::string& key,
                            const std::string& fallback);
    double take_number(const std::string& section, const std::string& key,
                       double fallback);
    long take_integer(const std::string& section, const std::string& key,
                      long fallback);
    bool take_bool(const std::string& section, const std::string& key,
                   bool fallback);
    std::vector<double> take_number_list(const std::string& section,
                                         const std::string& key,
                                         std::vector<double> fallback);

    // Throws ConfigError naming any key that was set but never consumed.
    void reject_unconsumed() const;

private:
    struct Entry {
        std::string value;
        bool consumed = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;

    Entry* find(const std::string& section, const std::string& key);
};

struct FisheryConfig {
    double horizon = 150.0, net_mortality = 0.01, predation = 0.01, h_max = 0.02;
    double w1 = 3.0, w2 = 2.0, w3 = 1.0;
    double growth_rate = 0.045, growth_capacity = 90.0, growth_initial = 6.0;
    double dt = 0.01;
};

struct ReservoirConfig {
    double capacity = 6e7, q_min = 1.0, q_max = 200.0, discount = 0.01;
    double env_flow = 10.0, weight_a = 0.2, penalty_scale = 5.0;
    std::string chain_file;  // optional; otherwise a synthetic birth-death chain
    long regimes = 61;
    double up_rate = 0.5, down_rate = 0.5;
    std::string discharges = "reservoir61";  // reservoir61 | coupled21 | coupled5
    long n_nodes = 401;
    double tolerance = 1e-12;
    long max_sweeps = 20000;
    double verify_y0 = 0.5;
    long verify_i0 = 31;  // 1-based regime
    double verify_horizon = 600.0;
    long verify_paths = 400;
};

struct AlgaeConfig {
    double growth_rate = 1.0, capacity_k0 = 0.4, capacity_k1 = 0.3;
    double detachment = 0.5, discount = 2.0;
    double q_min = 0.1, q_max = 2.0, q_target = 1.0;
    double weight_a = 0.1, cost_exponent = 0.5;
    std::string scheme = "upwind";  // upwind | expfit
    long n_nodes = 501;
    double tolerance = 1e-14;
    long max_iterations = 50;
};

struct SedimentConfig {
    double transport = 0.1, intensity = 0.1, cost_prop = 0.5, cost_fixed = 0.4;
    double discount = 0.1, epsilon = 0.01;
    double dx = 1.0 / 300.0;
    double dt_scale = 30.0;  // dt = dt_scale * dx^1.5
    double tolerance = 1e-10;
    long max_iterations = 200000;
    double verify_w0 = 1.0;
    double verify_horizon = 100.0;
    long verify_paths = 10000;
};

struct CoupledConfig {
    double reservoir_capacity = 6e7, sediment_capacity = 200.0;
    double trans_a = 3.82e4, trans_b = 1.31e-2, trans_c = 4.7e-2;
    double alpha0 = 0.1, alpha_m = 0.5, algae_r = 0.5, algae_cap = 1.0;
    double x1_hi = 0.8, x1_lo = 0.2, x2_lo = 0.2, x3_hi = 0.8, cost_power = 3.0;
    std::vector<double> a_coeffs = {0.0, 0.5, 2.0, 1.0 / 3.0, 3.0};
    double cost_prop = 0.15, cost_fixed = 0.05;
    double intensity = 0.1, discount = 0.0;
    double horizon = 60.0, dt = 0.05;
    long grid_level = 7;
    std::string chain_file;
    long regimes = 5;
    double up_rate = 0.5, down_rate = 0.5;
    std::string discharges = "coupled5";
    std::vector<double> output_times = {0.0, 30.0, 60.0};
    long verify_i0 = 2;  // 1-based regime
    std::vector<double> verify_x0 = {0.5, 0.5, 0.5};
    long verify_paths = 1000;
};

struct RunConfig {
    std::string problem;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    FisheryConfig fishery;
    ReservoirConfig reservoir;
    AlgaeConfig algae;
    SedimentConfig sediment;
    CoupledConfig coupled;
};

// Builds the typed configuration, consuming every key and validating ranges.
RunConfig build_run_config(ConfigMap& map);

} // namespace riverdp

#endif
