// Continuous-time Markov chain model of stochastic river inflow.
#ifndef RIVERDP_REGIME_HPP
#define RIVERDP_REGIME_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "riverdp/rng.hpp"

namespace riverdp {

// Regimes are indexed 0..I-1 internally; file formats and reports use 1-based
// indices to match the discharge formulas Q(i) below.
class RegimeChain {
public:
    // rates: I x I row-major transition rates (1/day); the diagonal is ignored.
    // discharges: Q(i) in m^3/s, one per regime.
    RegimeChain(std::vector<double> rates, std::vector<double> discharges);

    int n_regimes() const { return n_; }
    double rate(int i, int j) const { return rates_[static_cast<std::size_t>(i) * n_ + j]; }
    double exit_rate(int i) const { return exit_[i]; }
    double discharge(int i) const { return discharge_[i]; }
    const std::vector<double>& discharges() const { return discharge_; }

    // Nonzero off-diagonal transitions out of regime i.
    const std::vector<std::pair<int, double>>& transitions(int i) const {
        return transitions_[i];
    }

private:
    int n_;
    std::vector<double> rates_;
    std::vector<double> exit_;
    std::vector<double> discharge_;
    std::vector<std::vector<std::pair<int, double>>> transitions_;
};

// The 61-regime discharge menu Q(i) = 1.25 + 2.5 i (m^3/s), i = 1..61.
std::vector<double> paper_discharges_reservoir();

// The 21-regime discharge menu Q(i) = 2.5 + 5 (i-1) (m^3/s), i = 1..21.
std::vector<double> paper_discharges_coupled();

// Plain-text chain file: first line I; next I lines hold I whitespace-separated
// nonnegative rates (diagonal ignored); final line holds I discharges (m^3/s).
RegimeChain load_chain(const std::string& path);

// Nearest-neighbor birth-death chain: s_{i,i+1} = up_rate, s_{i,i-1} = down_rate.
RegimeChain synth_birth_death(int n_regimes, double up_rate, double down_rate,
                              std::vector<double> discharges);

struct RegimeSegment {
    double time;  // entry time of the segment
    int regime;
};

// Piecewise-constant regime path on [0, horizon]: exponential holding times
// with the exit rate, next regime drawn proportionally to s_ij.
std::vector<RegimeSegment> sample_path(const RegimeChain& chain, int i0,
                                       double horizon, std::uint64_t rng_seed);

std::vector<RegimeSegment> sample_path(const RegimeChain& chain, int i0,
                                       double horizon, Rng& rng);

} // namespace riverdp

#endif
