// Uniform 1-D grids used by all finite-difference and semi-Lagrangian solvers.
#ifndef RIVERDP_GRID_HPP
#define RIVERDP_GRID_HPP

#include <cmath>
#include <string>

#include "riverdp/errors.hpp"

namespace riverdp {

class UniformGrid1D {
public:
    UniformGrid1D(double lower, double upper, int n_nodes)
        : lower_(lower), upper_(upper), n_(n_nodes) {
        if (n_nodes < 2) {
            throw ConfigError("UniformGrid1D: n_nodes must be >= 2, got " +
                              std::to_string(n_nodes));
        }
        if (!(upper > lower)) {
            throw ConfigError("UniformGrid1D: requires upper > lower");
        }
        spacing_ = (upper - lower) / static_cast<double>(n_ - 1);
    }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    int n_nodes() const { return n_; }
    double spacing() const { return spacing_; }
    double node(int k) const { return lower_ + k * spacing_; }

    bool contains(double x) const { return x >= lower_ && x <= upper_; }

    // Cell index j with x in [node(j), node(j+1)], clamped to [0, n-2],
    // and the local coordinate theta in [0, 1].
    void locate(double x, int& j, double& theta) const {
        double s = (x - lower_) / spacing_;
        j = static_cast<int>(std::floor(s));
        if (j < 0) j = 0;
        if (j > n_ - 2) j = n_ - 2;
        theta = s - j;
        if (theta < 0.0) theta = 0.0;
        if (theta > 1.0) theta = 1.0;
    }

private:
    double lower_;
    double upper_;
    int n_;
    double spacing_;
};

} // namespace riverdp

#endif
