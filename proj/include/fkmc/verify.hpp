// Experiment drivers: the coupling-bound scan, the Hölder smoothing scan,
// and the discretization ladder for the coupled-action identity. Each
// produces a table plus the provenance needed to re-run it.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkmc/field.hpp"
#include "fkmc/fit.hpp"
#include "fkmc/kato.hpp"
#include "fkmc/mc.hpp"
#include "fkmc/semigroup.hpp"

namespace fkmc {

// Pairs (x, y) at controlled distances: for each base point b and distance
// d in the ladder, x = b + (d/2) axis and y = b - (d/2) axis.
struct PairSet {
    std::vector<std::vector<double>> bases;
    std::vector<double> axis;        // unit direction
    std::vector<double> distances;   // decreasing or increasing ladder

    int dim() const { return static_cast<int>(axis.size()); }
    void validate() const; // needs >= 4 distinct distance scales
};

// One emitted table: provenance comment lines, column names, rows.
struct ReportTable {
    std::vector<std::string> provenance; // rendered as '#' comment lines
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string headline; // one-line summary for the terminal
};

struct ExperimentBase {
    std::int64_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    double clamp_warn_rate = 1e-3;
};

// Coupling-bound scan: for each (t, delta) cell estimates the left side
// E|exp(-i theta_X) - exp(-i theta_Y)|, computes the bound with the given
// c0, and fits the distance exponent per t (and the t exponent per delta
// when several t are present).
struct CouplingBoundSpec : ExperimentBase {
    std::vector<double> t_values;
    std::vector<double> deltas;
    std::vector<double> base; // pair midpoint
    std::vector<double> axis;
    double c0 = 1.0;
    double q = 2.0;
    std::optional<LatticeSpec> lattice;
    QuadSpec quad;
};

ReportTable coupling_bound_experiment(const FieldSpec& field, const CouplingBoundSpec& spec,
                                      const Exec& exec);

// Smoothing scan: empirical beta-seminorm of exp(-tH(A,0))psi over a pair
// set, per t, with the log-log slope against t. Optionally also runs the
// independent-pair estimator on small distances for the variance comparison.
struct SmoothingExperimentSpec : ExperimentBase {
    std::vector<double> t_values;
    PairSet pairs;
    double beta = 0.5;
    bool compare_variance = false;
    double variance_delta_max = 0.2;
};

ReportTable smoothing_experiment(const FieldSpec& field, const Psi& psi,
                                 const SmoothingExperimentSpec& spec, const Exec& exec);

// Closed-form variant for A = 0 and half-space indicator data: the same
// table built from the exact heat semigroup instead of Monte Carlo.
ReportTable smoothing_closed_form(const SmoothingExperimentSpec& spec);

// Discretization ladder for the coupled-action identity: mean-square
// residual of (phase_X - phase_Y) - (M + I) per step width, on matched
// drivers (coarse increments are sums of the finest ones).
struct ResidualLadderSpec : ExperimentBase {
    std::vector<double> dt_ladder; // decreasing
    double t = 1.0;
    std::vector<double> x;
    std::vector<double> y;
};

ReportTable residual_ladder_experiment(const FieldSpec& field, const ResidualLadderSpec& spec,
                                       const Exec& exec);

} // namespace fkmc
