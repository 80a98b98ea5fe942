// Field data: vector potential, its divergence, optional scalar potential,
// and the metadata the experiments need (target Hölder exponent, clamping
// rule, declared sup candidates, radial structure for quadrature).

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fkmc/errors.hpp"

namespace fkmc {

using VectorFn = std::function<void(std::span<const double>, std::span<double>)>;
using ScalarFn = std::function<double(std::span<const double>)>;

// Scalar integrand handed to the Gaussian-expectation quadrature. When a
// radial profile about the origin is declared (dim 3 only), the 1-D radial
// rule applies; otherwise tensorized Gauss-Hermite.
struct ScalarField {
    int dim = 0;
    ScalarFn eval;                          // pointwise |f|
    std::function<double(double)> radial;   // f(x) = radial(|x|); optional
    bool singular_origin = false;           // radial profile blows up at r = 0
    std::string name;
};

struct FieldSpec {
    int dim = 0;
    std::string name = "zero";

    VectorFn vector_potential; // A; empty means A = 0
    ScalarFn div_a;            // divergence of A; empty means 0
    ScalarFn scalar_potential; // V; empty means V = 0

    double beta = 0.5; // target Hölder exponent in (0,1)
    double clamp = std::numeric_limits<double>::infinity(); // cap on |V|

    // Declared candidates for the spatial sup in the Kato functionals.
    std::vector<std::vector<double>> sup_candidates;

    // Radial profiles about the origin, when available, for the quadrature.
    std::function<double(double)> abs_a_radial;  // |A| as a function of r
    std::function<double(double)> abs_v_radial;  // |V| as a function of r
    bool v_singular_origin = false;

    bool globally_kato = true; // false: only locally integrable tails (use bounded windows)

    bool has_vector() const { return static_cast<bool>(vector_potential); }
    bool has_scalar() const { return static_cast<bool>(scalar_potential); }

    double q() const { return 1.0 / (1.0 - beta); }
    double q_conj() const { return 1.0 / beta; } // Hölder conjugate of q

    void check_beta() const {
        if (!(beta > 0.0) || !(beta < 1.0))
            throw DomainError("FieldSpec: beta must lie in (0,1)");
    }

    // |A|^p as a scalar integrand.
    ScalarField magnitude_power(double p) const;
    // |div A / 2|^p as a scalar integrand.
    ScalarField half_divergence_power(double p) const;
    // |V| as a scalar integrand.
    ScalarField potential_magnitude() const;
};

} // namespace fkmc
