// Error types shared across the solvers.
#ifndef RIVERDP_ERRORS_HPP
#define RIVERDP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace riverdp {

// Invalid parameters, grids, or configuration files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failures: non-finite values, singular systems, divergence.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace riverdp

#endif
