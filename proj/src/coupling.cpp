#include "fkmc/coupling.hpp"

#include <cmath>
#include <numbers>

#include "fkmc/errors.hpp"

namespace fkmc {

double coupling_survival_exact(double t, double delta) {
    if (!(t > 0.0)) throw DomainError("coupling_survival_exact: t must be positive");
    if (!(delta > 0.0)) throw DomainError("coupling_survival_exact: delta must be positive");
    return std::erf(delta / (2.0 * std::sqrt(2.0 * t)));
}

double coupling_survival_bound(double t, double delta) {
    if (!(t > 0.0)) throw DomainError("coupling_survival_bound: t must be positive");
    if (!(delta > 0.0)) throw DomainError("coupling_survival_bound: delta must be positive");
    return delta / std::sqrt(2.0 * std::numbers::pi * t);
}

namespace {

// Shared per-step crossing detection. The signed distance of the driver to
// the hyperplane is itself a 1-D random walk with step variance dt; before
// the hit it is strictly positive, so a hit within a step is either a
// non-positive right endpoint or a bridge excursion between two positive
// endpoints, accepted with probability exp(-2 s0 s1 / dt).
inline bool step_crosses(double s0, double s1, double dt, RngStream& rng) {
    if (s1 <= 0.0) return true;
    const double p = std::exp(-2.0 * s0 * s1 / dt);
    return rng.u01() < p;
}

} // namespace

CoupledPaths mirror_couple(const MirrorGeometry& geom, const TimeGrid& grid, RngStream& rng) {
    const int dim = geom.dim;
    CoupledPaths out;
    out.x_path.grid = grid;
    out.x_path.dim = dim;
    out.x_path.pts.resize(static_cast<std::size_t>((grid.n_steps + 1) * dim));
    out.y_path.grid = grid;
    out.y_path.dim = dim;
    out.y_path.pts.resize(out.x_path.pts.size());

    const double root_dt = std::sqrt(grid.dt);
    double* xs = out.x_path.pts.data();
    double* ys = out.y_path.pts.data();
    for (int i = 0; i < dim; ++i) xs[i] = geom.x[i];
    geom.reflect(xs, ys);

    double s = 0.5 * geom.delta; // signed distance, positive until the hit
    bool coupled = false;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        const double* prev = xs + k * dim;
        double* next = xs + (k + 1) * dim;
        double du = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double step = root_dt * rng.normal();
            next[i] = prev[i] + step;
            du += step * geom.unit[i];
        }
        double* ynext = ys + (k + 1) * dim;
        if (coupled) {
            for (int i = 0; i < dim; ++i) ynext[i] = next[i];
            continue;
        }
        const double s_next = s + du;
        if (step_crosses(s, s_next, grid.dt, rng)) {
            coupled = true;
            out.tau_step = k + 1;
            out.tau_time = grid.time(k + 1);
            for (int i = 0; i < dim; ++i) ynext[i] = next[i];
        } else {
            geom.reflect(next, ynext);
            s = s_next;
        }
    }
    return out;
}

std::optional<std::int64_t> sample_coupling_step(const MirrorGeometry& geom,
                                                 const TimeGrid& grid, RngStream& rng) {
    const int dim = geom.dim;
    const double root_dt = std::sqrt(grid.dt);
    double s = 0.5 * geom.delta;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        double du = 0.0;
        for (int i = 0; i < dim; ++i) du += root_dt * rng.normal() * geom.unit[i];
        const double s_next = s + du;
        if (step_crosses(s, s_next, grid.dt, rng)) return k + 1;
        s = s_next;
    }
    return std::nullopt;
}

namespace {

struct SurvivalPartial {
    std::int64_t survived = 0;
    std::int64_t n = 0;
    SurvivalPartial operator+(const SurvivalPartial& o) const {
        return {survived + o.survived, n + o.n};
    }
};

} // namespace

McEstimate maximality_deficit(const MirrorGeometry& geom, const TimeGrid& grid,
                              std::int64_t n_paths, std::uint64_t seed,
                              std::uint64_t stream_base, const Exec& exec) {
    if (n_paths < 1) throw DomainError("maximality_deficit: n_paths must be >= 1");
    auto partials = run_blocks<SurvivalPartial>(
        exec, n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            SurvivalPartial p;
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(seed, stream_base + static_cast<std::uint64_t>(i));
                if (!sample_coupling_step(geom, grid, rng).has_value()) ++p.survived;
                ++p.n;
            }
            return p;
        });
    const SurvivalPartial total = tree_reduce(std::move(partials));
    const double p_emp =
        static_cast<double>(total.survived) / static_cast<double>(total.n);
    const double p_exact = coupling_survival_exact(grid.t_end, geom.delta);
    McEstimate est;
    est.mean = {p_emp - p_exact, 0.0};
    est.std_error = std::sqrt(std::max(p_emp * (1.0 - p_emp), 1e-300) /
                              static_cast<double>(total.n));
    est.n = total.n;
    est.seed = seed;
    est.stream_base = stream_base;
    return est;
}

std::vector<double> empirical_survival(const MirrorGeometry& geom, const TimeGrid& grid,
                                       std::int64_t n_paths, std::uint64_t seed,
                                       std::uint64_t stream_base, const Exec& exec,
                                       const std::vector<std::int64_t>& at_steps) {
    struct CdfPartial {
        std::vector<std::int64_t> survived;
        std::int64_t n = 0;
        CdfPartial operator+(const CdfPartial& o) const {
            CdfPartial r{survived, n + o.n};
            for (std::size_t j = 0; j < r.survived.size(); ++j) r.survived[j] += o.survived[j];
            return r;
        }
    };
    for (auto k : at_steps)
        if (k < 1 || k > grid.n_steps)
            throw DomainError("empirical_survival: grid index out of range");
    auto partials = run_blocks<CdfPartial>(
        exec, n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            CdfPartial p;
            p.survived.assign(at_steps.size(), 0);
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(seed, stream_base + static_cast<std::uint64_t>(i));
                const auto tau = sample_coupling_step(geom, grid, rng);
                for (std::size_t j = 0; j < at_steps.size(); ++j)
                    if (!tau.has_value() || *tau > at_steps[j]) ++p.survived[j];
                ++p.n;
            }
            return p;
        });
    const CdfPartial total = tree_reduce(std::move(partials));
    std::vector<double> out(at_steps.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = static_cast<double>(total.survived[j]) / static_cast<double>(total.n);
    return out;
}

} // namespace fkmc
