// Deterministic quadrature building blocks: Gauss-Legendre and
// Gauss-Hermite rules, with node caching.

#pragma once

#include <functional>
#include <vector>

namespace fkmc {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
const QuadRule& gauss_legendre(int n);

// Gauss-Hermite rule for weight exp(-x^2) on the real line (physicists').
const QuadRule& gauss_hermite(int n);

// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Quadrature controls shared by the Kato-functional evaluations.
struct QuadSpec {
    int gh_nodes = 24;      // per axis, doubled for the acceptance check
    int gl_nodes = 16;      // per panel
    int max_panels = 56;    // geometric panels toward a singular endpoint
    double rel_tol = 1e-6;  // node-doubling acceptance threshold
    double tail_sigmas = 10.0; // radial cutoff in units of sqrt(s)
};

} // namespace fkmc
