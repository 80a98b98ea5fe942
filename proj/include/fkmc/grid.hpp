// Uniform time grid for path discretization.

#pragma once

#include <cmath>
#include <cstdint>

#include "fkmc/errors.hpp"

namespace fkmc {

struct TimeGrid {
    double t_end = 0.0;
    std::int64_t n_steps = 0;
    double dt = 0.0;

    static TimeGrid make(double t_end, std::int64_t n_steps) {
        if (!(t_end > 0.0) || !std::isfinite(t_end))
            throw DomainError("TimeGrid: t_end must be positive and finite");
        if (n_steps < 1) throw DomainError("TimeGrid: n_steps must be >= 1");
        return TimeGrid{t_end, n_steps, t_end / static_cast<double>(n_steps)};
    }

    // Grid built from a requested step width; t_end must be an integer
    // multiple of the request up to rounding.
    static TimeGrid from_dt(double t_end, double dt_request) {
        if (!(dt_request > 0.0)) throw DomainError("TimeGrid: dt must be positive");
        const double ratio = t_end / dt_request;
        const auto n = static_cast<std::int64_t>(std::llround(ratio));
        if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio + 1e-12)
            throw DomainError("TimeGrid: t_end is not an integer multiple of dt");
        return make(t_end, n);
    }

    double time(std::int64_t k) const { return static_cast<double>(k) * dt; }
};

} // namespace fkmc
