// Kato-class functionals of scalar fields along Brownian motion.
//
// The central object is  K_alpha(f, t) = sup_z int_0^t s^{-alpha/2} E_z|f(B_s)| ds.
// The spatial sup is taken over declared candidate points plus an optional
// coarse lattice; the time integral substitutes s = r^2 and splits [0,
// sqrt(t)] into geometric panels toward 0 so integrable singularities
// converge geometrically and non-integrable ones are detected and reported
// as divergent rather than silently truncated.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fkmc/field.hpp"
#include "fkmc/grid.hpp"
#include "fkmc/mc.hpp"
#include "fkmc/quadrature.hpp"

namespace fkmc {

struct LatticeSpec {
    double extent = 0.0; // cube [-extent, extent]^dim
    int per_axis = 0;
};

struct KatoQuery {
    double alpha = 0.0; // in [0, 1]
    double t = 0.0;     // > 0
    std::vector<std::vector<double>> candidates; // spatial sup candidates
    std::optional<LatticeSpec> lattice;
    QuadSpec quad;
};

struct KatoValue {
    double value = 0.0;
    std::vector<double> maximizer;
    double error_estimate = 0.0;
    bool finite = true;
};

// E_z |f(B_s)|: Gauss-Hermite tensor rule, or the exact 1-D radial rule when
// f declares a radial profile (dim 3). Includes the node-doubling acceptance
// check at the configured tolerance.
double gaussian_expectation(const ScalarField& f, std::span<const double> z, double s,
                            const QuadSpec& quad);

// K_alpha(f, t) over the query's candidate set.
KatoValue kato_functional(const ScalarField& f, const KatoQuery& query);

struct KatoProbe {
    std::vector<double> t_ladder;
    std::vector<double> values;
    double decay_exponent = 0.0; // log-log slope of value vs t
    bool passes = false;         // finite and decreasing toward 0
};

// Evaluates K_alpha along a decreasing t-ladder and reports the decay.
KatoProbe kato_membership_probe(const ScalarField& f, double alpha,
                                const std::vector<double>& t_ladder,
                                const std::vector<std::vector<double>>& candidates,
                                const QuadSpec& quad);

struct MagneticConstant {
    double a_term = 0.0;   // (sup_z int_0^t E_z|A|^{2q})^{1/q}
    double div_term = 0.0; // (sup_z int_0^t E_z|divA/2|^{q})^{1/q}
    double total() const { return a_term + div_term; }
};

// The field constant entering the coupling bound, built from two alpha = 0
// Kato functionals of the field's magnitude powers.
MagneticConstant magnetic_constant(const FieldSpec& field, double t, double q,
                                   const std::optional<LatticeSpec>& lattice,
                                   const QuadSpec& quad);

// D_V(s) = sup_z E_z |V(B_s)| over the candidate set.
double dv_profile(const ScalarField& v, double s,
                  const std::vector<std::vector<double>>& candidates, const QuadSpec& quad);

// Monte Carlo  E_z exp( int_0^t W(B_s) ds )  with the per-path exponent
// clamped at `exponent_cap` (counted, not hidden).
McEstimate exp_moment(const ScalarFn& w, int dim, std::span<const double> z,
                      const TimeGrid& grid, std::int64_t n_paths, double exponent_cap,
                      std::uint64_t seed, std::uint64_t stream_base, const Exec& exec);

} // namespace fkmc
