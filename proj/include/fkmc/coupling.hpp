// Mirror coupling of Brownian pairs.
//
// The partner path is the reflection of the driver until the driver hits the
// mirror hyperplane, and equal to it afterwards. On a grid the hit is
// detected either by a sign change of the signed distance or, between
// same-side grid points, by a Brownian-bridge crossing test, which makes the
// event {hit before t} exact in law. The hit is recorded at the end of the
// crossing step; the partner coincides with the driver from that grid point
// onward.

#pragma once

#include <cstdint>
#include <optional>

#include "fkmc/geometry.hpp"
#include "fkmc/grid.hpp"
#include "fkmc/mc.hpp"
#include "fkmc/path.hpp"
#include "fkmc/rng.hpp"

namespace fkmc {

struct CoupledPaths {
    BrownianPath x_path;
    BrownianPath y_path;
    std::optional<std::int64_t> tau_step; // first grid index where paths coincide
    std::optional<double> tau_time;

    bool coupled() const { return tau_step.has_value(); }
};

// Exact survival law of the coupling time started at separation delta:
// P(tau > t) = erf(delta / (2 sqrt(2 t))).
double coupling_survival_exact(double t, double delta);

// Closed-form upper bound (2 pi)^{-1/2} * delta * t^{-1/2} on the survival
// probability.
double coupling_survival_bound(double t, double delta);

// Builds the coupled pair from one stream of driver increments. Per step the
// stream yields dim normals, then one uniform for the bridge test while the
// pair is still apart and the step did not change sides.
CoupledPaths mirror_couple(const MirrorGeometry& geom, const TimeGrid& grid, RngStream& rng);

// Samples only the coupling step index, consuming the stream exactly as
// mirror_couple does up to the detected hit; nullopt if no hit before t_end.
std::optional<std::int64_t> sample_coupling_step(const MirrorGeometry& geom,
                                                 const TimeGrid& grid, RngStream& rng);

// Empirical check that the coupling is maximal: the difference between the
// empirical survival probability at t_end and the exact reflection law, with
// its binomial standard error. Path i uses stream stream_base + i.
McEstimate maximality_deficit(const MirrorGeometry& geom, const TimeGrid& grid,
                              std::int64_t n_paths, std::uint64_t seed,
                              std::uint64_t stream_base, const Exec& exec);

// Empirical survival probabilities P(tau > t_k) at the given grid indices,
// from the same per-path streams as maximality_deficit.
std::vector<double> empirical_survival(const MirrorGeometry& geom, const TimeGrid& grid,
                                       std::int64_t n_paths, std::uint64_t seed,
                                       std::uint64_t stream_base, const Exec& exec,
                                       const std::vector<std::int64_t>& at_steps);

} // namespace fkmc
