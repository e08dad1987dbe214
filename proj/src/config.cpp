#include "riverdp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace riverdp {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& section, const std::string& key,
                    const std::string& raw) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + section + "." + key +
                          " is not a number: '" + raw + "'");
    }
}

} // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("config: empty section name at line " +
                                  std::to_string(line_no));
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value at line " +
                              std::to_string(line_no));
        }
        if (section.empty()) {
            throw ConfigError("config: key outside any section at line " +
                              std::to_string(line_no));
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        map.set(section, key, value);
    }
    return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections_[section][key] = Entry{value, false};
}

void ConfigMap::apply_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like section.key=value: '" +
                          assignment + "'");
    }
    const std::string name = trim(assignment.substr(0, eq));
    const std::size_t dot = name.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == name.size()) {
        throw ConfigError("override must look like section.key=value: '" +
                          assignment + "'");
    }
    set(name.substr(0, dot), name.substr(dot + 1), trim(assignment.substr(eq + 1)));
}

ConfigMap::Entry* ConfigMap::find(const std::string& section,
                                  const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigMap::take_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return e->value;
}

double ConfigMap::take_number(const std::string& section, const std::string& key,
                              double fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return parse_number(section, key, e->value);
}

long ConfigMap::take_integer(const std::string& section, const std::string& key,
                             long fallback) {
    const double v = take_number(section, key, static_cast<double>(fallback));
    const long n = std::lround(v);
    if (static_cast<double>(n) != v) {
        throw ConfigError("config: " + section + "." + key + " must be an integer");
    }
    return n;
}

bool ConfigMap::take_bool(const std::string& section, const std::string& key,
                          bool fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    throw ConfigError("config: " + section + "." + key + " must be true or false");
}

std::vector<double> ConfigMap::take_number_list(const std::string& section,
                                                const std::string& key,
                                                std::vector<double> fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    std::string raw = e->value;
    if (!raw.empty() && raw.front() == '[' && raw.back() == ']') {
        raw = raw.substr(1, raw.size() - 2);
    }
    std::vector<double> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(section, key, item));
    }
    if (out.empty()) {
        throw ConfigError("config: " + section + "." + key + " is an empty list");
    }
    return out;
}

void ConfigMap::reject_unconsumed() const {
    for (const auto& [section, keys] : sections_) {
        for (const auto& [key, entry] : keys) {
            if (!entry.consumed) {
                throw ConfigError("config: unknown key " + section + "." + key);
            }
        }
    }
}

namespace {

void check(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

RunConfig build_run_config(ConfigMap& map) {
    RunConfig rc;
    rc.problem = map.take_string("run", "problem", "");
    rc.seed = static_cast<std::uint64_t>(map.take_integer("run", "seed", 1));
    rc.out_dir = map.take_string("run", "out_dir", "out");

    FisheryConfig& f = rc.fishery;
    f.horizon = map.take_number("fishery", "horizon", f.horizon);
    f.net_mortality = map.take_number("fishery", "net_mortality", f.net_mortality);
    f.predation = map.take_number("fishery", "predation", f.predation);
    f.h_max = map.take_number("fishery", "h_max", f.h_max);
    f.w1 = map.take_number("fishery", "w1", f.w1);
    f.w2 = map.take_number("fishery", "w2", f.w2);
    f.w3 = map.take_number("fishery", "w3", f.w3);
    f.growth_rate = map.take_number("fishery", "growth_rate", f.growth_rate);
    f.growth_capacity = map.take_number("fishery", "growth_capacity", f.growth_capacity);
    f.growth_initial = map.take_number("fishery", "growth_initial", f.growth_initial);
    f.dt = map.take_number("fishery", "dt", f.dt);

    ReservoirConfig& r = rc.reservoir;
    r.capacity = map.take_number("reservoir", "capacity", r.capacity);
    r.q_min = map.take_number("reservoir", "q_min", r.q_min);
    r.q_max = map.take_number("reservoir", "q_max", r.q_max);
    r.discount = map.take_number("reservoir", "discount", r.discount);
    r.env_flow = map.take_number("reservoir", "env_flow", r.env_flow);
    r.weight_a = map.take_number("reservoir", "weight_a", r.weight_a);
    r.penalty_scale = map.take_number("reservoir", "penalty_scale", r.penalty_scale);
    r.chain_file = map.take_string("reservoir", "chain_file", r.chain_file);
    r.regimes = map.take_integer("reservoir", "regimes", r.regimes);
    r.up_rate = map.take_number("reservoir", "up_rate", r.up_rate);
    r.down_rate = map.take_number("reservoir", "down_rate", r.down_rate);
    r.discharges = map.take_string("reservoir", "discharges", r.discharges);
    r.n_nodes = map.take_integer("reservoir", "n_nodes", r.n_nodes);
    r.tolerance = map.take_number("reservoir", "tolerance", r.tolerance);
    r.max_sweeps = map.take_integer("reservoir", "max_sweeps", r.max_sweeps);
    r.verify_y0 = map.take_number("reservoir", "verify_y0", r.verify_y0);
    r.verify_i0 = map.take_integer("reservoir", "verify_i0", r.verify_i0);
    r.verify_horizon = map.take_number("reservoir", "verify_horizon", r.verify_horizon);
    r.verify_paths = map.take_integer("reservoir", "verify_paths", r.verify_paths);
    check(r.q_min < r.q_max, "config: reservoir.q_min must be below reservoir.q_max");
    check(r.n_nodes >= 7, "config: reservoir.n_nodes must be >= 7");
    check(r.discount > 0.0, "config: reservoir.discount must be > 0");

    AlgaeConfig& a = rc.algae;
    a.growth_rate = map.take_number("algae", "growth_rate", a.growth_rate);
    a.capacity_k0 = map.take_number("algae", "capacity_k0", a.capacity_k0);
    a.capacity_k1 = map.take_number("algae", "capacity_k1", a.capacity_k1);
    a.detachment = map.take_number("algae", "detachment", a.detachment);
    a.discount = map.take_number("algae", "discount", a.discount);
    a.q_min = map.take_number("algae", "q_min", a.q_min);
    a.q_max = map.take_number("algae", "q_max", a.q_max);
    a.q_target = map.take_number("algae", "q_target", a.q_target);
    a.weight_a = map.take_number("algae", "weight_a", a.weight_a);
    a.cost_exponent = map.take_number("algae", "cost_exponent", a.cost_exponent);
    a.scheme = map.take_string("algae", "scheme", a.scheme);
    a.n_nodes = map.take_integer("algae", "n_nodes", a.n_nodes);
    a.tolerance = map.take_number("algae", "tolerance", a.tolerance);
    a.max_iterations = map.take_integer("algae", "max_iterations", a.max_iterations);
    check(a.q_min < a.q_max, "config: algae.q_min must be below algae.q_max");
    check(a.scheme == "upwind" || a.scheme == "expfit",
          "config: algae.scheme must be upwind or expfit");

    SedimentConfig& s = rc.sediment;
    s.transport = map.take_number("sediment", "transport", s.transport);
    s.intensity = map.take_number("sediment", "intensity", s.intensity);
    s.cost_prop = map.take_number("sediment", "cost_prop", s.cost_prop);
    s.cost_fixed = map.take_number("sediment", "cost_fixed", s.cost_fixed);
    s.discount = map.take_number("sediment", "discount", s.discount);
    s.epsilon = map.take_number("sediment", "epsilon", s.epsilon);
    s.dx = map.take_number("sediment", "dx", s.dx);
    s.dt_scale = map.take_number("sediment", "dt_scale", s.dt_scale);
    s.tolerance = map.take_number("sediment", "tolerance", s.tolerance);
    s.max_iterations = map.take_integer("sediment", "max_iterations", s.max_iterations);
    s.verify_w0 = map.take_number("sediment", "verify_w0", s.verify_w0);
    s.verify_horizon = map.take_number("sediment", "verify_horizon", s.verify_horizon);
    s.verify_paths = map.take_integer("sediment", "verify_paths", s.verify_paths);
    check(s.epsilon > 0.0 && s.epsilon < 1.0,
          "config: sediment.epsilon must be in (0, 1)");

    CoupledConfig& c = rc.coupled;
    c.reservoir_capacity = map.take_number("coupled", "reservoir_capacity", c.reservoir_capacity);
    c.sediment_capacity = map.take_number("coupled", "sediment_capacity", c.sediment_capacity);
    c.trans_a = map.take_number("coupled", "trans_a", c.trans_a);
    c.trans_b = map.take_number("coupled", "trans_b", c.trans_b);
    c.trans_c = map.take_number("coupled", "trans_c", c.trans_c);
    c.alpha0 = map.take_number("coupled", "alpha0", c.alpha0);
    c.alpha_m = map.take_number("coupled", "alpha_m", c.alpha_m);
    c.algae_r = map.take_number("coupled", "algae_r", c.algae_r);
    c.algae_cap = map.take_number("coupled", "algae_cap", c.algae_cap);
    c.x1_hi = map.take_number("coupled", "x1_hi", c.x1_hi);
    c.x1_lo = map.take_number("coupled", "x1_lo", c.x1_lo);
    c.x2_lo = map.take_number("coupled", "x2_lo", c.x2_lo);
    c.x3_hi = map.take_number("coupled", "x3_hi", c.x3_hi);
    c.cost_power = map.take_number("coupled", "cost_power", c.cost_power);
    c.a_coeffs = map.take_number_list("coupled", "a_coeffs", c.a_coeffs);
    c.cost_prop = map.take_number("coupled", "cost_prop", c.cost_prop);
    c.cost_fixed = map.take_number("coupled", "cost_fixed", c.cost_fixed);
    c.intensity = map.take_number("coupled", "intensity", c.intensity);
    c.discount = map.take_number("coupled", "discount", c.discount);
    c.horizon = map.take_number("coupled", "horizon", c.horizon);
    c.dt = map.take_number("coupled", "dt", c.dt);
    c.grid_level = map.take_integer("coupled", "grid_level", c.grid_level);
    c.chain_file = map.take_string("coupled", "chain_file", c.chain_file);
    c.regimes = map.take_integer("coupled", "regimes", c.regimes);
    c.up_rate = map.take_number("coupled", "up_rate", c.up_rate);
    c.down_rate = map.take_number("coupled", "down_rate", c.down_rate);
    c.discharges = map.take_string("coupled", "discharges", c.discharges);
    c.output_times = map.take_number_list("coupled", "output_times", c.output_times);
    c.verify_i0 = map.take_integer("coupled", "verify_i0", c.verify_i0);
    c.verify_x0 = map.take_number_list("coupled", "verify_x0", c.verify_x0);
    c.verify_paths = map.take_integer("coupled", "verify_paths", c.verify_paths);
    check(0.0 < c.x1_lo && c.x1_lo < c.x1_hi && c.x1_hi < 1.0,
          "config: coupled thresholds need 0 < x1_lo < x1_hi < 1");
    check(0.0 < c.x2_lo && c.x2_lo < 1.0, "config: coupled.x2_lo must be in (0, 1)");
    check(0.0 < c.x3_hi && c.x3_hi < 1.0, "config: coupled.x3_hi must be in (0, 1)");
    check(c.cost_power >= 3.0, "config: coupled.cost_power must be >= 3");
    check(c.verify_x0.size() == 3, "config: coupled.verify_x0 needs 3 entries");

    map.reject_unconsumed();

    if (!rc.problem.empty() && rc.problem != "fishery" && rc.problem != "reservoir" &&
        rc.problem != "algae" && rc.problem != "sediment" && rc.problem != "coupled") {
        throw ConfigError("config: run.problem must be one of fishery, reservoir, "
                          "algae, sediment, coupled");
    }
    return rc;
}

} // namespace riverdp
