// Stochastic action of a path in a magnetic field.
//
// The action of a driftless path Z is purely imaginary: i times the phase
// theta = sum_k <A(Z_k), Z_{k+1} - Z_k>  +  (1/2) sum_k divA(Z_k) dt
// (left-point rule throughout), so exp(-action) has unit modulus and only
// the phase is stored. For a mirror-coupled pair the phase difference
// splits into a martingale part M and a divergence part I supported before
// the coupling time.

#pragma once

#include <complex>

#include "fkmc/coupling.hpp"
#include "fkmc/field.hpp"
#include "fkmc/path.hpp"

namespace fkmc {

struct ActionSample {
    double phase = 0.0; // action = i * phase

    std::complex<double> weight() const { // exp(-action)
        return {std::cos(phase), -std::sin(phase)};
    }
};

struct ActionDecomposition {
    double phase_x = 0.0;
    double phase_y = 0.0;
    double m_term = 0.0;   // martingale part, phase convention
    double i_term = 0.0;   // divergence part, phase convention
    double residual = 0.0; // (phase_x - phase_y) - (m_term + i_term)
};

// Left-point Ito sum  sum_k <A(Z_k), Z_{k+1} - Z_k>.
// Throws NumericError naming the offending point if A evaluates non-finite.
double ito_integral(const FieldSpec& field, const BrownianPath& path);

// Left-point rule for  sum_k divA(Z_k) dt.
double divergence_integral(const FieldSpec& field, const BrownianPath& path);

ActionSample action_phase(const FieldSpec& field, const BrownianPath& path);

// Phase decomposition of a coupled pair:
//   M = sum_{k < tau_step} <A(X_k) - L A(R X_k), X_{k+1} - X_k>
//   I = sum_{k < tau_step} (1/2) (divA(X_k) - divA(R X_k)) dt
// with the full grid in place of tau_step when the pair never couples.
ActionDecomposition decompose_coupled_action(const FieldSpec& field,
                                             const MirrorGeometry& geom,
                                             const CoupledPaths& pair);

} // namespace fkmc
