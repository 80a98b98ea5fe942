#include "fkmc/path.hpp"

#include <cmath>
#include <numbers>

#include "fkmc/errors.hpp"

namespace fkmc {

double heat_kernel(std::span<const double> a, std::span<const double> b, double t) {
    if (a.size() != b.size() || a.empty())
        throw DomainError("heat_kernel: points must share a positive dimension");
    if (!(t > 0.0)) throw DomainError("heat_kernel: t must be positive");
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    const double two_pi_t = 2.0 * std::numbers::pi * t;
    return std::pow(two_pi_t, -0.5 * static_cast<double>(a.size())) * std::exp(-d2 / (2.0 * t));
}

void sample_path_into(BrownianPath& out, std::span<const double> start,
                      const TimeGrid& grid, RngStream& rng) {
    const int dim = static_cast<int>(start.size());
    if (dim < 1) throw DomainError("sample_path: empty start point");
    out.grid = grid;
    out.dim = dim;
    out.pts.resize(static_cast<std::size_t>((grid.n_steps + 1) * dim));
    const double root_dt = std::sqrt(grid.dt);
    double* p = out.pts.data();
    for (int i = 0; i < dim; ++i) p[i] = start[i];
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        const double* prev = p + k * dim;
        double* next = p + (k + 1) * dim;
        for (int i = 0; i < dim; ++i) next[i] = prev[i] + root_dt * rng.normal();
    }
}

BrownianPath sample_path(std::span<const double> start, const TimeGrid& grid, RngStream& rng) {
    BrownianPath out;
    sample_path_into(out, start, grid, rng);
    return out;
}

} // namespace fkmc
