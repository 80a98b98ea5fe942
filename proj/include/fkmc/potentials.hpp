// Shipped fields and potentials: molecular Coulomb potentials on
// configuration space, lifts of one-particle vector potentials, the constant
// planar magnetic field, and a compactly supported divergence-free test
// field. Evaluators are pure; clamping happens at the consumer.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fkmc/field.hpp"
#include "fkmc/quadrature.hpp"
#include "fkmc/rng.hpp"

namespace fkmc {

// n electrons in R^3 against l fixed nuclei with positive charges.
struct ParticleConfig {
    int n_electrons = 0;
    std::vector<std::vector<double>> nuclei;  // l positions in R^3
    std::vector<double> charges;              // l charges, each > 0

    int dim() const { return 3 * n_electrons; }
    void validate() const;
};

// V(x) = - sum_{i,j} Z_j / |x_i - R_j| + sum_{i<j} 1 / |x_i - x_j| on R^{3n}.
// Returns a FieldSpec with scalar part only; singular values are left exact
// (infinite at coincidence) and capped only by the consumer's clamp.
FieldSpec coulomb_potential(const ParticleConfig& config);

// Lifts a one-particle vector potential a on R^3 to n particles:
// A = sum_i a(x_i) in the i-th block, divA(x) = sum_i div_a(x_i).
FieldSpec lift_single_particle(const FieldSpec& one_particle, int n_particles);

// Constant magnetic field B in the plane, symmetric gauge:
// A(x) = (-B x2 / 2, B x1 / 2), divA = 0, curl A = B.
// Grows linearly, hence flagged as not globally Kato.
FieldSpec constant_field_2d(double b);

// Smooth compactly supported rotational field: A(x) = c phi(|x|^2) (-x2, x1)
// in the first two coordinates, zero outside |x| < radius. Divergence-free
// by construction; |A| <= amplitude with equality on an interior ring.
FieldSpec smooth_bump(int dim, double amplitude, double radius);

// L^s + L^inf splitting of a scalar field at threshold c:
// f = f 1_{|f|>c} + f 1_{|f|<=c}, with the L^s norm of the first part and
// the sup bound c of the second.
struct SplitReport {
    double threshold = 0.0;
    double s = 0.0;
    double ls_norm = 0.0; // ||f 1_{|f|>c}||_s, +inf when divergent
    double linf_bound = 0.0;
    bool finite = true;
};

SplitReport lq_split_norm(const ScalarField& f, double s, double threshold,
                          const QuadSpec& quad);

// Max relative error of the declared divergence against a central difference
// at `n_points` random points in [-box, box]^dim. Shipped-field self-check.
double divergence_check(const FieldSpec& field, int n_points, double box, RngStream& rng);

} // namespace fkmc
