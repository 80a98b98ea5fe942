// Monte Carlo evaluation of the magnetic Schrödinger semigroup
// exp(-t H(A,V)) through its path-integral representation: per path the
// weight is exp(-i theta) exp(-int V) with theta the stochastic action
// phase, averaged over driver paths started at the evaluation point.
//
// Pair differences use one mirror-coupled pair per sample (common random
// numbers); after the coupling time the phase difference is frozen, which
// the kernels enforce exactly.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "fkmc/action.hpp"
#include "fkmc/coupling.hpp"
#include "fkmc/field.hpp"
#include "fkmc/kato.hpp"
#include "fkmc/mc.hpp"

namespace fkmc {

struct Psi {
    std::function<std::complex<double>(std::span<const double>)> eval;
    bool is_real = false; // enables the real-only fast path when A = 0
};

struct SemigroupQuery {
    TimeGrid grid;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;
    double clamp_warn_rate = 1e-3; // warn when clamped evaluations exceed this rate
};

// MC mean of exp(-i theta) exp(-int_0^t V(Z) ds) psi(Z_t) over paths from x.
McEstimate evaluate(const FieldSpec& field, const Psi& psi, std::span<const double> x,
                    const SemigroupQuery& query, const Exec& exec);

struct PairDifferenceEstimate {
    McEstimate difference;      // mean of w_X psi(X_t) - w_Y psi(Y_t)
    double phase_term_mean = 0.0; // mean of |w_X - w_Y| |psi(X_t)|
    double phase_term_se = 0.0;
    double rough_term_mean = 0.0; // mean of 1_{tau > t} |psi(X_t) - psi(Y_t)|
    double rough_term_se = 0.0;
    double var_coupled = 0.0;   // per-sample variance of the difference score
};

// Coupled-pair estimate of exp(-tH(A,0))psi(x) - exp(-tH(A,0))psi(y),
// split into the phase-difference term and the uncoupled rough-data term.
// The scalar part of the field is ignored here.
PairDifferenceEstimate evaluate_pair_difference(const FieldSpec& field, const Psi& psi,
                                                std::span<const double> x,
                                                std::span<const double> y,
                                                const SemigroupQuery& query, const Exec& exec);

// Same estimand with independent drivers from x and y (no coupling); exists
// for the variance comparison.
PairDifferenceEstimate evaluate_pair_difference_independent(const FieldSpec& field,
                                                            const Psi& psi,
                                                            std::span<const double> x,
                                                            std::span<const double> y,
                                                            const SemigroupQuery& query,
                                                            const Exec& exec);

// MC mean of |exp(-i theta_X) - exp(-i theta_Y)| for a mirror-coupled pair;
// the modulus is frozen at the coupling time, allowing early exit.
McEstimate coupling_lhs(const FieldSpec& field, std::span<const double> x,
                        std::span<const double> y, const SemigroupQuery& query,
                        const Exec& exec);

// The matching bound c0 * C(A,t,q) * t^{-1/(2 q*)} * delta^{1/q*} with
// 1/q + 1/q* = 1 and C(A,t,q) the magnetic field constant.
double coupling_rhs(const MagneticConstant& constant, double t, double q, double delta,
                    double c0);

struct EigenResidual {
    McEstimate estimate;     // MC value of the semigroup at x
    double reference = 0.0;  // exp(-t * energy) * psi(x)
    double residual = 0.0;   // |estimate.mean - reference|
    double rel_error = 0.0;
};

// Residual of the eigenvalue relation exp(-tH)psi = exp(-t energy) psi at x.
EigenResidual eigen_residual(const FieldSpec& field, const Psi& psi, double energy,
                             std::span<const double> x, const SemigroupQuery& query,
                             const Exec& exec);

} // namespace fkmc
