// Command-line front end: run a solver, sweep a parameter, verify a value
// function by Monte Carlo, or dump a sparse grid.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riverdp/config.hpp"
#include "riverdp/csv.hpp"
#include "riverdp/errors.hpp"
#include "riverdp/runner.hpp"

namespace {

riverdp::ConfigMap load_map(const std::string& config_path,
                            const std::vector<std::string>& overrides,
                            const std::string& out_dir, long seed) {
    riverdp::ConfigMap map = config_path.empty()
                                 ? riverdp::ConfigMap::parse_string("")
                                 : riverdp::ConfigMap::parse_file(config_path);
    for (const auto& o : overrides) map.apply_override(o);
    if (!out_dir.empty()) map.set("run", "out_dir", out_dir);
    if (seed >= 0) map.set("run", "seed", std::to_string(seed));
    return map;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-programming solvers for river management problems"};
    app.require_subcommand(1);

    std::string config_path, out_dir, key, values_csv, policy_file, dump_path;
    std::vector<std::string> overrides;
    long seed = -1;
    int workers = 2;
    int dim = 3, level = 11;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file");
        cmd->add_option("--set", overrides, "override section.key=value")
            ->take_all();
        cmd->add_option("--out-dir", out_dir, "output directory");
        cmd->add_option("--seed", seed, "random seed");
    };

    CLI::App* run = app.add_subcommand("run", "solve the configured problem");
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "run one instance per value");
    add_common(sweep);
    sweep->add_option("--key", key, "parameter to sweep (section.key)")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--workers", workers, "concurrent instances");

    CLI::App* verify = app.add_subcommand("verify", "Monte Carlo verification");
    add_common(verify);
    verify->add_option("--policy-file", policy_file,
                       "sediment replenishment rule (CSV columns w, omega)");

    CLI::App* dump = app.add_subcommand("grid-dump", "write sparse grid points");
    dump->add_option("--dim", dim, "dimensions");
    dump->add_option("--level", level, "grid level (>= dim)");
    dump->add_option("--out", dump_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump->parsed()) {
            return riverdp::run_grid_dump(dim, level, dump_path);
        }
        riverdp::ConfigMap map = load_map(config_path, overrides, out_dir, seed);
        if (run->parsed()) {
            riverdp::RunConfig rc = riverdp::build_run_config(map);
            return riverdp::run_problem(rc);
        }
        if (sweep->parsed()) {
            std::vector<double> values;
            std::string item;
            std::istringstream in(values_csv);
            while (std::getline(in, item, ',')) {
                if (!item.empty()) values.push_back(std::stod(item));
            }
            return riverdp::run_sweep(map, key, values, workers);
        }
        if (verify->parsed()) {
            riverdp::RunConfig rc = riverdp::build_run_config(map);
            return riverdp::run_verify(rc, policy_file);
        }
    } catch (const riverdp::ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 1;
}
