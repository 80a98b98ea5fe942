#include "fkmc/action.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "fkmc/errors.hpp"
#include "fkmc/kahan.hpp"

namespace fkmc {

namespace {

[[noreturn]] void throw_nonfinite(const char* what, const double* p, int dim) {
    std::ostringstream msg;
    msg << what << " evaluated non-finite at point (";
    for (int i = 0; i < dim; ++i) msg << (i ? ", " : "") << p[i];
    msg << ")";
    throw NumericError(msg.str());
}

inline void eval_a(const FieldSpec& field, const double* p, int dim, std::vector<double>& out) {
    field.vector_potential(std::span<const double>(p, static_cast<std::size_t>(dim)),
                           std::span<double>(out.data(), out.size()));
    for (int i = 0; i < dim; ++i)
        if (!std::isfinite(out[i])) throw_nonfinite("vector potential", p, dim);
}

inline double eval_div(const FieldSpec& field, const double* p, int dim) {
    const double v =
        field.div_a(std::span<const double>(p, static_cast<std::size_t>(dim)));
    if (!std::isfinite(v)) throw_nonfinite("divergence", p, dim);
    return v;
}

} // namespace

double ito_integral(const FieldSpec& field, const BrownianPath& path) {
    if (!field.has_vector()) return 0.0;
    if (field.dim != path.dim) throw DomainError("ito_integral: dimension mismatch");
    const int dim = path.dim;
    std::vector<double> a(static_cast<std::size_t>(dim));
    KahanSum acc;
    for (std::int64_t k = 0; k < path.grid.n_steps; ++k) {
        const double* p = path.point(k);
        const double* q = path.point(k + 1);
        eval_a(field, p, dim, a);
        double dot = 0.0;
        for (int i = 0; i < dim; ++i) dot += a[i] * (q[i] - p[i]);
        acc.add(dot);
    }
    return acc.value();
}

double divergence_integral(const FieldSpec& field, const BrownianPath& path) {
    if (!field.div_a) return 0.0;
    if (field.dim != path.dim) throw DomainError("divergence_integral: dimension mismatch");
    KahanSum acc;
    for (std::int64_t k = 0; k < path.grid.n_steps; ++k)
        acc.add(eval_div(field, path.point(k), path.dim) * path.grid.dt);
    return acc.value();
}

ActionSample action_phase(const FieldSpec& field, const BrownianPath& path) {
    return ActionSample{ito_integral(field, path) + 0.5 * divergence_integral(field, path)};
}

ActionDecomposition decompose_coupled_action(const FieldSpec& field,
                                             const MirrorGeometry& geom,
                                             const CoupledPaths& pair) {
    const BrownianPath& x = pair.x_path;
    if (x.dim != geom.dim || pair.y_path.dim != geom.dim)
        throw DomainError("decompose_coupled_action: dimension mismatch");
    const std::int64_t cutoff = pair.tau_step.value_or(x.grid.n_steps);

    ActionDecomposition out;
    out.phase_x = action_phase(field, x).phase;
    out.phase_y = action_phase(field, pair.y_path).phase;

    const int dim = x.dim;
    std::vector<double> a_x(static_cast<std::size_t>(dim));
    std::vector<double> a_r(static_cast<std::size_t>(dim));
    std::vector<double> rx(static_cast<std::size_t>(dim));
    std::vector<double> la(static_cast<std::size_t>(dim));
    KahanSum m_acc;
    KahanSum i_acc;
    for (std::int64_t k = 0; k < cutoff; ++k) {
        const double* p = x.point(k);
        const double* p1 = x.point(k + 1);
        geom.reflect(p, rx.data());
        if (field.has_vector()) {
            eval_a(field, p, dim, a_x);
            eval_a(field, rx.data(), dim, a_r);
            geom.reflect_dir(a_r.data(), la.data());
            double dot = 0.0;
            for (int i = 0; i < dim; ++i) dot += (a_x[i] - la[i]) * (p1[i] - p[i]);
            m_acc.add(dot);
        }
        if (field.div_a) {
            i_acc.add(0.5 * (eval_div(field, p, dim) - eval_div(field, rx.data(), dim)) *
                      x.grid.dt);
        }
    }
    out.m_term = m_acc.value();
    out.i_term = i_acc.value();
    out.residual = (out.phase_x - out.phase_y) - (out.m_term + out.i_term);
    return out;
}

} // namespace fkmc
