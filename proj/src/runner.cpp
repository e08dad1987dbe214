#include "riverdp/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "riverdp/algae.hpp"
#include "riverdp/coupled.hpp"
#include "riverdp/csv.hpp"
#include "riverdp/errors.hpp"
#include "riverdp/fishery.hpp"
#include "riverdp/reservoir.hpp"
#include "riverdp/sediment.hpp"
#include "riverdp/sparse_grid.hpp"
#include "riverdp/weno.hpp"

namespace riverdp {

namespace {

using nlohmann::json;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << j.dump(2) << '\n';
}

std::string out_path(const RunConfig& rc, const std::string& name) {
    std::filesystem::create_directories(rc.out_dir);
    return (std::filesystem::path(rc.out_dir) / name).string();
}

std::vector<double> preset_discharges(const std::string& name, long regimes) {
    if (name == "reservoir61") {
        if (regimes != 61) {
            throw ConfigError("discharge preset reservoir61 requires regimes = 61");
        }
        return paper_discharges_reservoir();
    }
    if (name == "coupled21") {
        if (regimes != 21) {
            throw ConfigError("discharge preset coupled21 requires regimes = 21");
        }
        return paper_discharges_coupled();
    }
    if (name == "coupled5") {
        if (regimes != 5) {
            throw ConfigError("discharge preset coupled5 requires regimes = 5");
        }
        const std::vector<double> full = paper_discharges_coupled();
        return {full[0], full[5], full[10], full[15], full[20]};
    }
    throw ConfigError("unknown discharge preset '" + name + "'");
}

FisheryParams make_fishery_params(const FisheryConfig& fc) {
    FisheryParams p;
    p.horizon = fc.horizon;
    p.net_mortality = fc.net_mortality;
    p.predation = fc.predation;
    p.h_max = fc.h_max;
    p.w1 = fc.w1;
    p.w2 = fc.w2;
    p.w3 = fc.w3;
    p.growth = GrowthCurve(fc.growth_rate, fc.growth_capacity, fc.growth_initial);
    p.dt = fc.dt;
    return p;
}

AlgaeParams make_algae_params(const AlgaeConfig& ac) {
    AlgaeParams p;
    p.growth_rate = ac.growth_rate;
    p.capacity_k0 = ac.capacity_k0;
    p.capacity_k1 = ac.capacity_k1;
    p.detachment = ac.detachment;
    p.discount = ac.discount;
    p.q_min = ac.q_min;
    p.q_max = ac.q_max;
    p.q_target = ac.q_target;
    p.weight_a = ac.weight_a;
    p.cost_exponent = ac.cost_exponent;
    p.scheme = (ac.scheme == "expfit") ? AlgaeScheme::kExponential
                                       : AlgaeScheme::kUpwind;
    return p;
}

SedimentParams make_sediment_params(const SedimentConfig& sc) {
    SedimentParams p;
    p.transport = sc.transport;
    p.intensity = sc.intensity;
    p.cost_prop = sc.cost_prop;
    p.cost_fixed = sc.cost_fixed;
    p.discount = sc.discount;
    p.epsilon = sc.epsilon;
    return p;
}

int run_fishery(const RunConfig& rc) {
    const double t0 = now_seconds();
    FisheryParams p = make_fishery_params(rc.fishery);
    PsiSolution s = solve_psi(p);

    std::vector<double> weight(s.times.size());
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        weight[k] = p.growth.weight_at(s.times[k]);
    }
    const auto psi_n = normalize_series(s.psi);
    const auto w_n = normalize_series(weight);
    const auto h_n = normalize_series(s.h_star);
    const auto u_n = normalize_series(s.u_star);

    CsvWriter csv(out_path(rc, "fishery.csv"),
                  {"t", "psi", "U", "h_star", "u_star", "psi_norm", "U_norm",
                   "h_norm", "u_norm"});
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        csv.field(s.times[k]);
        csv.field(s.psi[k]);
        csv.field(weight[k]);
        csv.field(s.h_star[k]);
        csv.field(s.u_star[k]);
        csv.field(psi_n[k]);
        csv.field(w_n[k]);
        csv.field(h_n[k]);
        csv.field(u_n[k]);
        csv.end_row();
    }

    json j;
    j["problem"] = "fishery";
    j["w3"] = p.w3;
    j["psi_at_0"] = s.psi.front();
    const auto t0_switch = detect_harvest_threshold(s);
    if (t0_switch) j["harvest_threshold"] = *t0_switch;
    else j["harvest_threshold"] = nullptr;
    j["runtime_seconds"] = now_seconds() - t0;
    write_json(out_path(rc, "summary.json"), j);
    return 0;
}

int run_reservoir(const RunConfig& rc) {
    const double t0 = now_seconds();
    ReservoirParams p(make_reservoir_chain(rc.reservoir));
    p.capacity = rc.reservoir.capacity;
    p.q_min = rc.reservoir.q_min;
    p.q_max = rc.reservoir.q_max;
    p.discount = rc.reservoir.discount;
    p.env_flow = rc.reservoir.env_flow;
    p.weight_a = rc.reservoir.weight_a;
    p.penalty_scale = rc.reservoir.penalty_scale;

    StationaryValue v = reservoir_solve_stationary(
        p, static_cast<int>(rc.reservoir.n_nodes), rc.reservoir.tolerance,
        static_cast<int>(rc.reservoir.max_sweeps));

    CsvWriter csv(out_path(rc, "reservoir.csv"),
                  {"regime", "y", "value", "normalized_policy"});
    for (int i = 0; i < v.n_regimes; ++i) {
        for (int k = 0; k < v.grid.n_nodes(); ++k) {
            csv.field(i + 1);
            csv.field(v.grid.node(k));
            csv.field(v.value(i, k));
            csv.field(v.policy_at(i, k));
            csv.end_row();
        }
    }
    CsvWriter hist(out_path(rc, "reservoir_residuals.csv"), {"sweep", "sup_change"});
    for (std::size_t s = 0; s < v.residual_history.size(); ++s) {
        hist.field(static_cast<long>(s + 1));
        hist.field(v.residual_history[s]);
        hist.end_row();
    }

    json j;
    j["problem"] = "reservoir";
    j["iterations"] = v.iterations;
    j["converged"] = v.converged;
    j["discrete_residual"] = reservoir_discrete_residual(p, v);
    j["runtime_seconds"] = now_seconds() - t0;
    write_json(out_path(rc, "summary.json"), j);
    return v.converged ? 0 : 2;
}

int run_algae(const RunConfig& rc) {
    const double t0 = now_seconds();
    AlgaeParams p = make_algae_params(rc.algae);
    AlgaePolicySolution s = algae_solve_policy_iteration(
        p, static_cast<int>(rc.algae.n_nodes), rc.algae.tolerance,
        static_cast<int>(rc.algae.max_iterations));

    CsvWriter csv(out_path(rc, "algae.csv"), {"a", "z", "value", "q_star"});
    for (int k = 0; k < s.grid.n_nodes(); ++k) {
        csv.field(p.weight_a);
        csv.field(s.grid.node(k));
        csv.field(s.value[k]);
        csv.field(s.policy[k]);
        csv.end_row();
    }

    json j;
    j["problem"] = "algae";
    j["weight_a"] = p.weight_a;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["transition_metric"] = algae_policy_transition_metric(s);
    j["runtime_seconds"] = now_seconds() - t0;
    write_json(out_path(rc, "summary.json"), j);
    return s.converged ? 0 : 2;
}

int run_sediment(const RunConfig& rc) {
    const double t0 = now_seconds();
    SedimentParams p = make_sediment_params(rc.sediment);
    const double dx = rc.sediment.dx;
    const double dt = rc.sediment.dt_scale * std::pow(dx, 1.5);
    SedimentSolution s = sediment_solve_value_iteration(
        p, dx, dt, rc.sediment.tolerance,
        static_cast<int>(rc.sediment.max_iterations));

    CsvWriter csv(out_path(rc, "sediment.csv"), {"epsilon", "w", "value", "omega"});
    for (int k = 0; k < s.grid.n_nodes(); ++k) {
        csv.field(p.epsilon);
        csv.field(s.grid.node(k));
        csv.field(s.value[k]);
        csv.field(s.replenish[k]);
        csv.end_row();
    }

    json j;
    j["problem"] = "sediment";
    j["epsilon"] = p.epsilon;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    if (s.threshold) j["threshold"] = *s.threshold;
    else j["threshold"] = nullptr;
    j["runtime_seconds"] = now_seconds() - t0;
    write_json(out_path(rc, "summary.json"), j);
    return s.converged ? 0 : 2;
}

CoupledParams make_coupled_params(const CoupledConfig& cc) {
    CoupledParams p(make_coupled_chain(cc));
    p.reservoir_capacity = cc.reservoir_capacity;
    p.sediment_capacity = cc.sediment_capacity;
    p.trans_a = cc.trans_a;
    p.trans_b = cc.trans_b;
    p.trans_c = cc.trans_c;
    p.alpha0 = cc.alpha0;
    p.alpha_m = cc.alpha_m;
    p.algae_r = cc.algae_r;
    p.algae_cap = cc.algae_cap;
    p.x1_hi = cc.x1_hi;
    p.x1_lo = cc.x1_lo;
    p.x2_lo = cc.x2_lo;
    p.x3_hi = cc.x3_hi;
    p.cost_power = cc.cost_power;
    p.a_coeffs = cc.a_coeffs;
    p.cost_prop = cc.cost_prop;
    p.cost_fixed = cc.cost_fixed;
    p.intensity = cc.intensity;
    p.discount = cc.discount;
    p.horizon = cc.horizon;
    p.dt = cc.dt;
    p.grid_level = static_cast<int>(cc.grid_level);
    p.output_times = cc.output_times;
    return p;
}

int run_coupled(const RunConfig& rc) {
    const double t0 = now_seconds();
    CoupledParams p = make_coupled_params(rc.coupled);
    CoupledSolver solver(p);
    CoupledSolution sol = solver.solve();

    CsvWriter pol(out_path(rc, "coupled_policy.csv"),
                  {"t", "regime", "x1", "x2", "x3", "q_multiplier_index",
                   "q_value_m3s", "replenish"});
    for (const auto& slice : sol.policies) {
        for (int i = 0; i < p.chain.n_regimes(); ++i) {
            for (const auto& row : coupled_policy_slice(sol, p, slice.time, i)) {
                pol.field(slice.time);
                pol.field(i + 1);
                pol.field(row.x1);
                pol.field(row.x2);
                pol.field(row.x3);
                pol.field(row.q_index);
                pol.field(row.q_value);
                pol.field(row.replenish);
                pol.end_row();
            }
        }
    }

    CsvWriter val(out_path(rc, "coupled_value.csv"),
                  {"t", "regime", "point_index", "value", "surplus"});
    for (std::size_t s = 0; s < sol.times.size(); ++s) {
        for (int i = 0; i < p.chain.n_regimes(); ++i) {
            for (std::size_t k = 0; k < sol.grid.n_points(); ++k) {
                val.field(sol.times[s]);
                val.field(i + 1);
                val.field(k);
                val.field(sol.values[s][i][k]);
                val.field(sol.surpluses[s][i][k]);
                val.end_row();
            }
        }
    }
    run_grid_dump(3, p.grid_level, out_path(rc, "coupled_grid.csv"));

    json j;
    j["problem"] = "coupled";
    j["grid_points"] = sol.grid.n_points();
    j["min_nodal_value"] = sol.min_nodal_value;
    j["min_backward_increment"] = sol.min_backward_increment;
    j["runtime_seconds"] = now_seconds() - t0;
    write_json(out_path(rc, "summary.json"), j);
    return 0;
}

} // namespace

RegimeChain make_reservoir_chain(const ReservoirConfig& rc) {
    if (!rc.chain_file.empty()) return load_chain(rc.chain_file);
    return synth_birth_death(static_cast<int>(rc.regimes), rc.up_rate, rc.down_rate,
                             preset_discharges(rc.discharges, rc.regimes));
}

RegimeChain make_coupled_chain(const CoupledConfig& cc) {
    if (!cc.chain_file.empty()) return load_chain(cc.chain_file);
    return synth_birth_death(static_cast<int>(cc.regimes), cc.up_rate, cc.down_rate,
                             preset_discharges(cc.discharges, cc.regimes));
}

int run_problem(const RunConfig& rc) {
    if (rc.problem == "fishery") return run_fishery(rc);
    if (rc.problem == "reservoir") return run_reservoir(rc);
    if (rc.problem == "algae") return run_algae(rc);
    if (rc.problem == "sediment") return run_sediment(rc);
    if (rc.problem == "coupled") return run_coupled(rc);
    throw ConfigError("run.problem must be set (fishery, reservoir, algae, "
                      "sediment, coupled)");
}

int run_sweep(const ConfigMap& base_map, const std::string& key,
              const std::vector<double>& values, int workers) {
    if (values.empty()) throw ConfigError("sweep: values list is empty");
    if (key.find('.') == std::string::npos) {
        throw ConfigError("sweep: key must look like section.key");
    }

    struct Instance {
        double value;
        RunConfig config;
        int exit_code = 1;
        std::string error;
    };
    std::vector<Instance> instances;
    std::string base_out;
    {
        ConfigMap probe = base_map;
        base_out = build_run_config(probe).out_dir;
    }
    for (double v : values) {
        ConfigMap m = base_map;
        m.apply_override(key + "=" + format_double(v));
        Instance inst;
        inst.value = v;
        inst.config = build_run_config(m);
        inst.config.out_dir =
            (std::filesystem::path(base_out) / (key.substr(key.find('.') + 1) + "_" +
                                                format_double(v)))
                .string();
        instances.push_back(std::move(inst));
    }

    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&]() {
        while (true) {
            std::size_t mine;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= instances.size()) return;
                mine = next++;
            }
            Instance& inst = instances[mine];
            try {
                inst.exit_code = run_problem(inst.config);
            } catch (const std::exception& e) {
                inst.exit_code = 1;
                inst.error = e.what();
            }
        }
    };
    const int n_workers =
        std::max(1, std::min<int>(workers, static_cast<int>(instances.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Combined long-format output plus a per-value summary.
    std::filesystem::create_directories(base_out);
    const std::string problem = instances.front().config.problem;
    CsvWriter summary((std::filesystem::path(base_out) / "sweep_summary.csv").string(),
                      {"value", "exit_code", "error"});
    std::ofstream combined(
        (std::filesystem::path(base_out) / "sweep_combined.csv").string(),
        std::ios::binary);
    bool wrote_header = false;
    for (const Instance& inst : instances) {
        summary.field(inst.value);
        summary.field(inst.exit_code);
        summary.field(inst.error);
        summary.end_row();
        if (inst.exit_code == 1) continue;
        const std::string per_value =
            (std::filesystem::path(inst.config.out_dir) / (problem + ".csv")).string();
        std::ifstream in(per_value, std::ios::binary);
        if (!in) continue;
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (header) {
                if (!wrote_header) {
                    combined << line << '\n';
                    wrote_header = true;
                }
                header = false;
                continue;
            }
            combined << line << '\n';
        }
    }

    int worst = 0;
    for (const Instance& inst : instances) worst = std::max(worst, inst.exit_code);
    return worst;
}

int run_verify(const RunConfig& rc, const std::string& policy_file) {
    json j;
    j["problem"] = rc.problem;
    bool pass = false;

    if (rc.problem == "sediment") {
        SedimentParams p = make_sediment_params(rc.sediment);
        const double dx = rc.sediment.dx;
        const double dt = rc.sediment.dt_scale * std::pow(dx, 1.5);
        SedimentSolution s = sediment_solve_value_iteration(
            p, dx, dt, rc.sediment.tolerance,
            static_cast<int>(rc.sediment.max_iterations));
        if (!policy_file.empty()) {
            // Replace the computed replenishment rule by the supplied one.
            std::ifstream in(policy_file);
            if (!in) throw ConfigError("cannot open policy file '" + policy_file + "'");
            std::string line;
            std::getline(in, line);  // header
            std::vector<int> flags(s.replenish.size(), 0);
            while (std::getline(in, line)) {
                std::replace(line.begin(), line.end(), ',', ' ');
                std::istringstream row(line);
                double w, omega;
                if (row >> w >> omega) {
                    int k = static_cast<int>(std::lround(w / s.grid.spacing()));
                    if (k >= 0 && k < static_cast<int>(flags.size())) {
                        flags[k] = omega > 0.5 ? 1 : 0;
                    }
                }
            }
            s.replenish = flags;
        }
        const double w0 = rc.sediment.verify_w0;
        EstimateReport est =
            sediment_mc_verify(p, s, w0, rc.sediment.verify_horizon,
                               static_cast<int>(rc.sediment.verify_paths), rc.seed);
        const double predicted = weno3_interpolate(s.value, s.grid, w0);
        const double allowance = 0.02;
        const double gap = est.mean - predicted;
        pass = std::abs(gap) <= 3.0 * est.std_error + allowance;
        j["w0"] = w0;
        j["predicted"] = predicted;
        j["estimate"] = est.mean;
        j["std_error"] = est.std_error;
        j["n_paths"] = est.n_paths;
        j["allowance"] = allowance;
        j["gap"] = gap;
        j["policy_file"] = policy_file;
    } else if (rc.problem == "reservoir") {
        ReservoirParams p(make_reservoir_chain(rc.reservoir));
        p.capacity = rc.reservoir.capacity;
        p.q_min = rc.reservoir.q_min;
        p.q_max = rc.reservoir.q_max;
        p.discount = rc.reservoir.discount;
        p.env_flow = rc.reservoir.env_flow;
        p.weight_a = rc.reservoir.weight_a;
        p.penalty_scale = rc.reservoir.penalty_scale;
        StationaryValue v = reservoir_solve_stationary(
            p, static_cast<int>(rc.reservoir.n_nodes), rc.reservoir.tolerance,
            static_cast<int>(rc.reservoir.max_sweeps));
        const int i0 = static_cast<int>(rc.reservoir.verify_i0) - 1;
        if (i0 < 0 || i0 >= v.n_regimes) {
            throw ConfigError("reservoir.verify_i0 out of range");
        }
        const double y0 = rc.reservoir.verify_y0;
        EstimateReport est = reservoir_mc_verify(
            p, v, y0, i0, rc.reservoir.verify_horizon,
            static_cast<int>(rc.reservoir.verify_paths), rc.seed);
        int jlo;
        double th;
        v.grid.locate(y0, jlo, th);
        const double predicted =
            (1.0 - th) * v.value(i0, jlo) + th * v.value(i0, jlo + 1);
        // Truncation bias plus a discretization allowance for the interpolated
        // suboptimal policy.
        const double truncation =
            std::exp(-p.discount * rc.reservoir.verify_horizon) / p.discount;
        const double allowance = truncation + 0.02 * (1.0 + std::abs(predicted));
        const double gap = est.mean - predicted;
        pass = std::abs(gap) <= 3.0 * est.std_error + allowance;
        j["y0"] = y0;
        j["i0"] = rc.reservoir.verify_i0;
        j["predicted"] = predicted;
        j["estimate"] = est.mean;
        j["std_error"] = est.std_error;
        j["n_paths"] = est.n_paths;
        j["allowance"] = allowance;
        j["gap"] = gap;
    } else if (rc.problem == "coupled") {
        CoupledParams p = make_coupled_params(rc.coupled);
        CoupledSolver solver(p);
        CoupledSolution sol = solver.solve();
        const int i0 = static_cast<int>(rc.coupled.verify_i0) - 1;
        if (i0 < 0 || i0 >= p.chain.n_regimes()) {
            throw ConfigError("coupled.verify_i0 out of range");
        }
        std::array<double, 3> x0 = {rc.coupled.verify_x0[0], rc.coupled.verify_x0[1],
                                    rc.coupled.verify_x0[2]};
        EstimateReport est = coupled_mc_verify(
            p, sol, x0, i0, static_cast<int>(rc.coupled.verify_paths), rc.seed);
        // Value at t = 0 from the stored slice (interpolated on the grid).
        double predicted = 0.0;
        bool found = false;
        for (std::size_t s = 0; s < sol.times.size(); ++s) {
            if (std::abs(sol.times[s]) <= 0.5 * p.dt) {
                predicted = sol.grid.evaluate(sol.surpluses[s][i0], x0.data());
                found = true;
            }
        }
        if (!found) throw ConfigError("coupled verify: t = 0 slice not stored");
        // The simulated policy is read from coarse slices at nearest nodes, so
        // it is suboptimal: the estimate may sit above the value but must not
        // fall below it statistically.
        const double band = 0.10 * (1.0 + std::abs(predicted));
        const double gap = est.mean - predicted;
        pass = gap >= -(3.0 * est.std_error + 0.02) &&
               gap <= 3.0 * est.std_error + band;
        j["x0"] = rc.coupled.verify_x0;
        j["i0"] = rc.coupled.verify_i0;
        j["predicted"] = predicted;
        j["estimate"] = est.mean;
        j["std_error"] = est.std_error;
        j["n_paths"] = est.n_paths;
        j["upper_band"] = band;
        j["gap"] = gap;
    } else {
        throw ConfigError("verify supports problems with a Monte Carlo check: "
                          "reservoir, sediment, coupled");
    }

    j["pass"] = pass;
    std::filesystem::create_directories(rc.out_dir);
    write_json((std::filesystem::path(rc.out_dir) / "verify.json").string(), j);
    std::cout << j.dump(2) << std::endl;
    return pass ? 0 : 1;
}

int run_grid_dump(int dim, int level, const std::string& out_path_str) {
    SparseGrid grid(dim, level);
    std::vector<std::string> header{"point"};
    for (int d = 0; d < dim; ++d) header.push_back("level" + std::to_string(d + 1));
    for (int d = 0; d < dim; ++d) header.push_back("index" + std::to_string(d + 1));
    for (int d = 0; d < dim; ++d) header.push_back("x" + std::to_string(d + 1));
    CsvWriter csv(out_path_str, header);
    for (std::size_t k = 0; k < grid.n_points(); ++k) {
        csv.field(k);
        const auto lev = grid.point_levels(k);
        const auto idx = grid.point_indices(k);
        for (int d = 0; d < dim; ++d) csv.field(static_cast<int>(lev[d]));
        for (int d = 0; d < dim; ++d) csv.field(static_cast<long>(idx[d]));
        for (int d = 0; d < dim; ++d) csv.field(grid.coordinate(k, d));
        csv.end_row();
    }
    return 0;
}

} // namespace riverdp
