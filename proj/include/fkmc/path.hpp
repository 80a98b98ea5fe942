// Brownian path storage and sampling on a uniform grid.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fkmc/grid.hpp"
#include "fkmc/rng.hpp"

namespace fkmc {

struct BrownianPath {
    TimeGrid grid;
    int dim = 0;
    std::vector<double> pts; // (n_steps + 1) * dim, row-major by grid index

    double* point(std::int64_t k) { return pts.data() + k * dim; }
    const double* point(std::int64_t k) const { return pts.data() + k * dim; }
    std::span<const double> point_span(std::int64_t k) const {
        return {point(k), static_cast<std::size_t>(dim)};
    }
};

// Gaussian transition density of d-dimensional Brownian motion,
// (2 pi t)^{-d/2} exp(-|a-b|^2 / (2t)). Throws on t <= 0.
double heat_kernel(std::span<const double> a, std::span<const double> b, double t);

// Samples a Brownian path started at `start`, one normal per coordinate per
// step, drawn from `rng` in coordinate order.
BrownianPath sample_path(std::span<const double> start, const TimeGrid& grid, RngStream& rng);

// In-place variant reusing the storage of `out`.
void sample_path_into(BrownianPath& out, std::span<const double> start,
                      const TimeGrid& grid, RngStream& rng);

} // namespace fkmc
