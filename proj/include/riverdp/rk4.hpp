// Classical four-stage Runge-Kutta integration of terminal value problems.
#ifndef RIVERDP_RK4_HPP
#define RIVERDP_RK4_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "riverdp/errors.hpp"

namespace riverdp {

struct Trajectory {
    std::vector<double> times;  // as integrated: t_end first, t_start last
    std::vector<double> values;
};

// Integrates dy/dt = rhs(t, y) from (t_end, terminal_value) down to t_start
// on a uniform mesh with step size <= dt chosen to land exactly on t_start.
inline Trajectory rk4_integrate_backward(
    const std::function<double(double, double)>& rhs, double terminal_value,
    double t_end, double t_start, double dt) {
    if (!(dt > 0.0)) throw ConfigError("rk4_integrate_backward: dt must be > 0");
    if (!(t_start < t_end)) {
        throw ConfigError("rk4_integrate_backward: requires t_start < t_end");
    }

    Trajectory out;
    const double span = t_end - t_start;
    const long n_steps = std::max(1L, std::lround(std::ceil(span / dt - 1e-12)));
    out.times.reserve(n_steps + 1);
    out.values.reserve(n_steps + 1);

    double t = t_end;
    double y = terminal_value;
    out.times.push_back(t);
    out.values.push_back(y);

    auto eval = [&](double ts, double ys, long step) {
        double v = rhs(ts, ys);
        if (!std::isfinite(v)) {
            throw NumericError("rk4_integrate_backward: non-finite rhs at step " +
                               std::to_string(step) + ", t=" + std::to_string(ts) +
                               ", y=" + std::to_string(ys));
        }
        return v;
    };

    for (long step = 0; step < n_steps; ++step) {
        double t_next = t_end - span * static_cast<double>(step + 1) /
                                    static_cast<double>(n_steps);
        if (step + 1 == n_steps) t_next = t_start;
        const double h = t_next - t;  // negative
        const double k1 = eval(t, y, step);
        const double k2 = eval(t + 0.5 * h, y + 0.5 * h * k1, step);
        const double k3 = eval(t + 0.5 * h, y + 0.5 * h * k2, step);
        const double k4 = eval(t + h, y + h * k3, step);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(y)) {
            throw NumericError("rk4_integrate_backward: non-finite state at step " +
                               std::to_string(step) + ", t=" + std::to_string(t_next));
        }
        t = t_next;
        out.times.push_back(t);
        out.values.push_back(y);
    }
    return out;
}

} // namespace riverdp

#endif
