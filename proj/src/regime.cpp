#include "riverdp/regime.hpp"

#include <fstream>
#include <sstream>

#include "riverdp/errors.hpp"

namespace riverdp {

RegimeChain::RegimeChain(std::vector<double> rates, std::vector<double> discharges)
    : n_(static_cast<int>(discharges.size())),
      rates_(std::move(rates)),
      discharge_(std::move(discharges)) {
    if (n_ < 1) throw ConfigError("RegimeChain: need at least one regime");
    if (rates_.size() != static_cast<std::size_t>(n_) * n_) {
        throw ConfigError("RegimeChain: rate matrix must be I x I");
    }
    exit_.assign(n_, 0.0);
    transitions_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        if (!(discharge_[i] > 0.0)) {
            throw ConfigError("RegimeChain: discharge Q(" + std::to_string(i + 1) +
                              ") must be positive");
        }
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const double s = rates_[static_cast<std::size_t>(i) * n_ + j];
            if (s < 0.0) {
                throw ConfigError("RegimeChain: negative rate s(" +
                                  std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
            }
            if (s > 0.0) {
                transitions_[i].emplace_back(j, s);
                exit_[i] += s;
            }
        }
        // Derived diagonal: s_ii = -exit_rate(i), so generator rows sum to 0.
        rates_[static_cast<std::size_t>(i) * n_ + i] = -exit_[i];
    }
}

std::vector<double> paper_discharges_reservoir() {
    std::vector<double> q(61);
    for (int i = 1; i <= 61; ++i) q[i - 1] = 1.25 + 2.5 * i;
    return q;
}

std::vector<double> paper_discharges_coupled() {
    std::vector<double> q(21);
    for (int i = 1; i <= 21; ++i) q[i - 1] = 2.5 + 5.0 * (i - 1);
    return q;
}

RegimeChain load_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_chain: cannot open '" + path + "'");
    int n = 0;
    if (!(in >> n) || n < 1) {
        throw ConfigError("load_chain: first line must be the regime count");
    }
    std::vector<double> rates(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s;
            if (!(in >> s)) {
                throw ConfigError("load_chain: missing rate at row " +
                                  std::to_string(i + 1) + ", column " +
                                  std::to_string(j + 1));
            }
            if (i != j && s < 0.0) {
                throw ConfigError("load_chain: negative rate at row " +
                                  std::to_string(i + 1) + ", column " +
                                  std::to_string(j + 1));
            }
            rates[static_cast<std::size_t>(i) * n + j] = s;
        }
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) {
        if (!(in >> q[i])) {
            throw ConfigError("load_chain: missing discharge " + std::to_string(i + 1));
        }
        if (!(q[i] > 0.0)) {
            throw ConfigError("load_chain: discharge " + std::to_string(i + 1) +
                              " must be positive");
        }
    }
    return RegimeChain(std::move(rates), std::move(q));
}

RegimeChain synth_birth_death(int n_regimes, double up_rate, double down_rate,
                              std::vector<double> discharges) {
    if (n_regimes < 2) throw ConfigError("synth_birth_death: need I >= 2");
    if (!(up_rate > 0.0) || !(down_rate > 0.0)) {
        throw ConfigError("synth_birth_death: rates must be positive");
    }
    if (discharges.size() != static_cast<std::size_t>(n_regimes)) {
        throw ConfigError("synth_birth_death: discharge count mismatch");
    }
    std::vector<double> rates(static_cast<std::size_t>(n_regimes) * n_regimes, 0.0);
    for (int i = 0; i < n_regimes; ++i) {
        if (i + 1 < n_regimes) rates[static_cast<std::size_t>(i) * n_regimes + i + 1] = up_rate;
        if (i > 0) rates[static_cast<std::size_t>(i) * n_regimes + i - 1] = down_rate;
    }
    return RegimeChain(std::move(rates), std::move(discharges));
}

std::vector<RegimeSegment> sample_path(const RegimeChain& chain, int i0,
                                       double horizon, Rng& rng) {
    if (i0 < 0 || i0 >= chain.n_regimes()) {
        throw ConfigError("sample_path: regime index out of range");
    }
    if (!(horizon > 0.0)) throw ConfigError("sample_path: horizon must be > 0");

    std::vector<RegimeSegment> path;
    double t = 0.0;
    int i = i0;
    path.push_back({0.0, i});
    while (true) {
        const double rate = chain.exit_rate(i);
        if (rate <= 0.0) break;  // absorbing regime
        t += rng.exponential(rate);
        if (t >= horizon) break;
        double u = rng.u01() * rate;
        const auto& outgoing = chain.transitions(i);
        int next = outgoing.back().first;  // fp-safe fallback
        for (const auto& [j, s] : outgoing) {
            if (u < s) {
                next = j;
                break;
            }
            u -= s;
        }
        i = next;
        path.push_back({t, i});
    }
    return path;
}

std::vector<RegimeSegment> sample_path(const RegimeChain& chain, int i0,
                                       double horizon, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return sample_path(chain, i0, horizon, rng);
}

} // namespace riverdp
