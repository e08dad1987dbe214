// Deterministic logistic body-weight curve for the harvested fish.
#ifndef RIVERDP_GROWTH_HPP
#define RIVERDP_GROWTH_HPP

#include <cmath>

#include "riverdp/errors.hpp"

namespace riverdp {

class GrowthCurve {
public:
    GrowthCurve(double rate, double capacity, double initial_weight)
        : rate_(rate), capacity_(capacity), initial_(initial_weight) {
        if (!(rate > 0.0)) throw ConfigError("GrowthCurve: rate must be > 0");
        if (!(initial_weight > 0.0) || !(initial_weight < capacity)) {
            throw ConfigError("GrowthCurve: requires 0 < initial_weight < capacity");
        }
    }

    double rate() const { return rate_; }
    double capacity() const { return capacity_; }
    double initial_weight() const { return initial_; }

    // U_t = capacity / (1 + ((capacity - initial)/initial) e^{-rate t}).
    double weight_at(double t) const {
        if (t < 0.0) throw ConfigError("GrowthCurve: t must be >= 0");
        const double b = (capacity_ - initial_) / initial_;
        return capacity_ / (1.0 + b * std::exp(-rate_ * t));
    }

private:
    double rate_;      // 1/day
    double capacity_;  // g
    double initial_;   // g
};

} // namespace riverdp

#endif
