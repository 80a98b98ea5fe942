#include "fkmc/semigroup.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fkmc/errors.hpp"
#include "fkmc/kahan.hpp"

namespace fkmc {

namespace {

struct ScalarMoments {
    KahanSum sum;
    KahanSum sumsq;

    void add(double v) {
        sum.add(v);
        sumsq.add(v * v);
    }

    ScalarMoments operator+(const ScalarMoments& o) const {
        ScalarMoments r = *this;
        r.sum.add(o.sum.value());
        r.sumsq.add(o.sumsq.value());
        return r;
    }
};

void finish_scalar(const ScalarMoments& m, std::int64_t n, double& mean, double& se) {
    if (n <= 0) {
        mean = 0.0;
        se = 0.0;
        return;
    }
    mean = m.sum.value() / static_cast<double>(n);
    if (n == 1) {
        se = 0.0;
        return;
    }
    const double var =
        std::max(0.0, (m.sumsq.value() - static_cast<double>(n) * mean * mean) /
                          static_cast<double>(n - 1));
    se = std::sqrt(var / static_cast<double>(n));
}

[[noreturn]] void throw_path_nonfinite(const char* what, std::int64_t path) {
    throw NumericError(std::string(what) + " became non-finite on path " +
                       std::to_string(path));
}

struct PairPartial {
    ComplexMoments diff;
    ScalarMoments phase_term;
    ScalarMoments rough_term;

    PairPartial operator+(const PairPartial& o) const {
        PairPartial r;
        r.diff = diff + o.diff;
        r.phase_term = phase_term + o.phase_term;
        r.rough_term = rough_term + o.rough_term;
        return r;
    }
};

PairDifferenceEstimate finish_pair(const std::vector<PairPartial>& partials,
                                   const SemigroupQuery& query) {
    const PairPartial total = tree_reduce(partials);
    PairDifferenceEstimate out;
    out.difference = finish_estimate(total.diff, query.seed, query.stream_base);
    finish_scalar(total.phase_term, total.diff.n, out.phase_term_mean, out.phase_term_se);
    finish_scalar(total.rough_term, total.diff.n, out.rough_term_mean, out.rough_term_se);
    out.var_coupled =
        out.difference.std_error * out.difference.std_error * static_cast<double>(total.diff.n);
    return out;
}

struct WalkResult {
    std::complex<double> weight;   // exp(-i theta) exp(-int V)
    std::complex<double> terminal; // psi(Z_t)

    std::complex<double> score() const { return weight * terminal; }
};

// One independent driver path: accumulates the action phase and the clamped
// potential integral while walking.
WalkResult walk_single(const FieldSpec& field, const Psi& psi,
                       std::span<const double> start, const TimeGrid& grid, RngStream& rng,
                       std::vector<double>& z, std::vector<double>& a_buf,
                       std::int64_t path_index, std::int64_t& clamps) {
    const int d = field.dim;
    const double sdt = std::sqrt(grid.dt);
    const bool with_a = field.has_vector();
    const bool with_div = static_cast<bool>(field.div_a);
    const bool with_v = field.has_scalar();
    z.assign(start.begin(), start.end());
    KahanSum phase;
    KahanSum v_int;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        double a_dot = 0.0;
        double div_term = 0.0;
        if (with_a) field.vector_potential(z, a_buf);
        if (with_div) div_term = 0.5 * field.div_a(z) * grid.dt;
        if (with_v) {
            double v = field.scalar_potential(z);
            if (std::isnan(v)) throw_path_nonfinite("scalar potential", path_index);
            if (std::abs(v) > field.clamp) {
                v = std::copysign(field.clamp, v);
                ++clamps;
            }
            if (!std::isfinite(v)) throw_path_nonfinite("scalar potential", path_index);
            v_int.add(v * grid.dt);
        }
        for (int i = 0; i < d; ++i) {
            const double dz = sdt * rng.normal();
            if (with_a) a_dot += a_buf[static_cast<std::size_t>(i)] * dz;
            z[static_cast<std::size_t>(i)] += dz;
        }
        if (with_a) phase.add(a_dot);
        if (with_div) phase.add(div_term);
    }
    const double theta = phase.value();
    const double vi = v_int.value();
    if (!std::isfinite(theta)) throw_path_nonfinite("action phase", path_index);
    const double mod = with_v ? std::exp(-vi) : 1.0;
    if (!std::isfinite(mod)) throw_path_nonfinite("potential weight", path_index);
    return {{std::cos(theta) * mod, -std::sin(theta) * mod}, psi.eval(z)};
}

} // namespace

McEstimate evaluate(const FieldSpec& field, const Psi& psi, std::span<const double> x,
                    const SemigroupQuery& query, const Exec& exec) {
    if (static_cast<int>(x.size()) != field.dim)
        throw DomainError("evaluate: point dimension does not match the field");
    if (query.n_paths <= 0) throw DomainError("evaluate: need a positive path count");
    auto partials = run_blocks<ComplexMoments>(
        exec, query.n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            ComplexMoments m;
            std::vector<double> z(x.size());
            std::vector<double> a_buf(x.size());
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(query.seed, query.stream_base + static_cast<std::uint64_t>(i));
                const std::complex<double> score =
                    walk_single(field, psi, x, query.grid, rng, z, a_buf, i, m.clamps).score();
                m.add(score.real(), score.imag());
            }
            return m;
        });
    const ComplexMoments total = tree_reduce(partials);
    McEstimate est = finish_estimate(total, query.seed, query.stream_base);
    const double evals = static_cast<double>(query.n_paths) *
                         static_cast<double>(std::max<std::int64_t>(query.grid.n_steps, 1));
    est.clamp_warning =
        field.has_scalar() && static_cast<double>(est.clamp_count) > query.clamp_warn_rate * evals;
    return est;
}

PairDifferenceEstimate evaluate_pair_difference(const FieldSpec& field, const Psi& psi,
                                                std::span<const double> x,
                                                std::span<const double> y,
                                                const SemigroupQuery& query, const Exec& exec) {
    const MirrorGeometry geom = MirrorGeometry::make(x, y);
    if (geom.dim != field.dim)
        throw DomainError("evaluate_pair_difference: pair dimension does not match the field");
    if (query.n_paths <= 0)
        throw DomainError("evaluate_pair_difference: need a positive pair count");
    const TimeGrid grid = query.grid;
    const int d = geom.dim;
    const double sdt = std::sqrt(grid.dt);
    const bool with_a = field.has_vector();
    const bool with_div = static_cast<bool>(field.div_a);

    auto partials = run_blocks<PairPartial>(
        exec, query.n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            PairPartial part;
            std::vector<double> zx(static_cast<std::size_t>(d));
            std::vector<double> zx_next(static_cast<std::size_t>(d));
            std::vector<double> zy(static_cast<std::size_t>(d));
            std::vector<double> zy_next(static_cast<std::size_t>(d));
            std::vector<double> dz(static_cast<std::size_t>(d));
            std::vector<double> a_x(static_cast<std::size_t>(d));
            std::vector<double> a_y(static_cast<std::size_t>(d));
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(query.seed, query.stream_base + static_cast<std::uint64_t>(i));
                zx.assign(geom.x.begin(), geom.x.end());
                geom.reflect(zx.data(), zy.data());
                KahanSum theta_x;
                KahanSum theta_y;
                bool coupled = false;
                for (std::int64_t k = 0; k < grid.n_steps; ++k) {
                    if (!coupled) {
                        if (with_a) {
                            field.vector_potential(zx, a_x);
                            field.vector_potential(zy, a_y);
                        }
                        double div_x = 0.0;
                        double div_y = 0.0;
                        if (with_div) {
                            div_x = field.div_a(zx);
                            div_y = field.div_a(zy);
                        }
                        const double s0 = geom.signed_dist(zx.data());
                        for (int c = 0; c < d; ++c) {
                            dz[static_cast<std::size_t>(c)] = sdt * rng.normal();
                            zx_next[static_cast<std::size_t>(c)] =
                                zx[static_cast<std::size_t>(c)] + dz[static_cast<std::size_t>(c)];
                        }
                        const double s1 = geom.signed_dist(zx_next.data());
                        bool crossing = s1 <= 0.0;
                        if (!crossing) {
                            const double u = rng.u01();
                            crossing = u < std::exp(-2.0 * s0 * s1 / grid.dt);
                        }
                        if (crossing)
                            zy_next = zx_next;
                        else
                            geom.reflect(zx_next.data(), zy_next.data());
                        double ax_dot = 0.0;
                        double ay_dot = 0.0;
                        if (with_a) {
                            for (int c = 0; c < d; ++c) {
                                ax_dot += a_x[static_cast<std::size_t>(c)] *
                                          dz[static_cast<std::size_t>(c)];
                                ay_dot += a_y[static_cast<std::size_t>(c)] *
                                          (zy_next[static_cast<std::size_t>(c)] -
                                           zy[static_cast<std::size_t>(c)]);
                            }
                            theta_x.add(ax_dot);
                            theta_y.add(ay_dot);
                        }
                        if (with_div) {
                            theta_x.add(0.5 * div_x * grid.dt);
                            theta_y.add(0.5 * div_y * grid.dt);
                        }
                        zx.swap(zx_next);
                        zy.swap(zy_next);
                        if (crossing) coupled = true;
                    } else {
                        // Common increments: the same phase increment lands on
                        // both sides, keeping the difference frozen exactly.
                        double a_dot = 0.0;
                        double div_term = 0.0;
                        if (with_a) field.vector_potential(zx, a_x);
                        if (with_div) div_term = 0.5 * field.div_a(zx) * grid.dt;
                        for (int c = 0; c < d; ++c) {
                            const double step = sdt * rng.normal();
                            if (with_a) a_dot += a_x[static_cast<std::size_t>(c)] * step;
                            zx[static_cast<std::size_t>(c)] += step;
                        }
                        if (with_a) {
                            theta_x.add(a_dot);
                            theta_y.add(a_dot);
                        }
                        if (with_div) {
                            theta_x.add(div_term);
                            theta_y.add(div_term);
                        }
                    }
                }
                const double tx = theta_x.value();
                const double ty = theta_y.value();
                if (!std::isfinite(tx) || !std::isfinite(ty))
                    throw_path_nonfinite("action phase", i);
                const std::complex<double> wx{std::cos(tx), -std::sin(tx)};
                const std::complex<double> wy{std::cos(ty), -std::sin(ty)};
                const std::complex<double> psi_x = psi.eval(zx);
                const std::complex<double> psi_y = coupled ? psi_x : psi.eval(zy);
                const std::complex<double> diff = wx * psi_x - wy * psi_y;
                part.diff.add(diff.real(), diff.imag());
                part.phase_term.add(std::abs(wx - wy) * std::abs(psi_x));
                part.rough_term.add(coupled ? 0.0 : std::abs(psi_x - psi_y));
            }
            return part;
        });
    return finish_pair(partials, query);
}

PairDifferenceEstimate evaluate_pair_difference_independent(const FieldSpec& field,
                                                            const Psi& psi,
                                                            std::span<const double> x,
                                                            std::span<const double> y,
                                                            const SemigroupQuery& query,
                                                            const Exec& exec) {
    if (static_cast<int>(x.size()) != field.dim || static_cast<int>(y.size()) != field.dim)
        throw DomainError(
            "evaluate_pair_difference_independent: pair dimension does not match the field");
    if (query.n_paths <= 0)
        throw DomainError("evaluate_pair_difference_independent: need a positive pair count");
    FieldSpec no_scalar = field;
    no_scalar.scalar_potential = nullptr;
    auto partials = run_blocks<PairPartial>(
        exec, query.n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            PairPartial part;
            std::vector<double> z(x.size());
            std::vector<double> a_buf(x.size());
            for (std::int64_t i = begin; i < end; ++i) {
                std::int64_t clamps = 0;
                RngStream rng_x(query.seed,
                                query.stream_base + 2 * static_cast<std::uint64_t>(i));
                const WalkResult rx =
                    walk_single(no_scalar, psi, x, query.grid, rng_x, z, a_buf, i, clamps);
                RngStream rng_y(query.seed,
                                query.stream_base + 2 * static_cast<std::uint64_t>(i) + 1);
                const WalkResult ry =
                    walk_single(no_scalar, psi, y, query.grid, rng_y, z, a_buf, i, clamps);
                const std::complex<double> diff = rx.score() - ry.score();
                part.diff.add(diff.real(), diff.imag());
                part.phase_term.add(std::abs(rx.weight - ry.weight) * std::abs(rx.terminal));
                part.rough_term.add(std::abs(rx.terminal - ry.terminal));
            }
            return part;
        });
    return finish_pair(partials, query);
}

McEstimate coupling_lhs(const FieldSpec& field, std::span<const double> x,
                        std::span<const double> y, const SemigroupQuery& query,
                        const Exec& exec) {
    const MirrorGeometry geom = MirrorGeometry::make(x, y);
    if (geom.dim != field.dim)
        throw DomainError("coupling_lhs: pair dimension does not match the field");
    if (query.n_paths <= 0) throw DomainError("coupling_lhs: need a positive pair count");
    const TimeGrid grid = query.grid;
    const int d = geom.dim;
    const double sdt = std::sqrt(grid.dt);
    const bool with_a = field.has_vector();
    const bool with_div = static_cast<bool>(field.div_a);

    auto partials = run_blocks<ComplexMoments>(
        exec, query.n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            ComplexMoments m;
            std::vector<double> zx(static_cast<std::size_t>(d));
            std::vector<double> zx_next(static_cast<std::size_t>(d));
            std::vector<double> zy(static_cast<std::size_t>(d));
            std::vector<double> zy_next(static_cast<std::size_t>(d));
            std::vector<double> dz(static_cast<std::size_t>(d));
            std::vector<double> a_x(static_cast<std::size_t>(d));
            std::vector<double> a_y(static_cast<std::size_t>(d));
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(query.seed, query.stream_base + static_cast<std::uint64_t>(i));
                zx.assign(geom.x.begin(), geom.x.end());
                geom.reflect(zx.data(), zy.data());
                KahanSum theta_x;
                KahanSum theta_y;
                // The modulus |w_X - w_Y| is frozen at the coupling time, so
                // the walk stops there.
                for (std::int64_t k = 0; k < grid.n_steps; ++k) {
                    if (with_a) {
                        field.vector_potential(zx, a_x);
                        field.vector_potential(zy, a_y);
                    }
                    double div_x = 0.0;
                    double div_y = 0.0;
                    if (with_div) {
                        div_x = field.div_a(zx);
                        div_y = field.div_a(zy);
                    }
                    const double s0 = geom.signed_dist(zx.data());
                    for (int c = 0; c < d; ++c) {
                        dz[static_cast<std::size_t>(c)] = sdt * rng.normal();
                        zx_next[static_cast<std::size_t>(c)] =
                            zx[static_cast<std::size_t>(c)] + dz[static_cast<std::size_t>(c)];
                    }
                    const double s1 = geom.signed_dist(zx_next.data());
                    bool crossing = s1 <= 0.0;
                    if (!crossing) {
                        const double u = rng.u01();
                        crossing = u < std::exp(-2.0 * s0 * s1 / grid.dt);
                    }
                    if (crossing)
                        zy_next = zx_next;
                    else
                        geom.reflect(zx_next.data(), zy_next.data());
                    if (with_a) {
                        double ax_dot = 0.0;
                        double ay_dot = 0.0;
                        for (int c = 0; c < d; ++c) {
                            ax_dot +=
                                a_x[static_cast<std::size_t>(c)] * dz[static_cast<std::size_t>(c)];
                            ay_dot += a_y[static_cast<std::size_t>(c)] *
                                      (zy_next[static_cast<std::size_t>(c)] -
                                       zy[static_cast<std::size_t>(c)]);
                        }
                        theta_x.add(ax_dot);
                        theta_y.add(ay_dot);
                    }
                    if (with_div) {
                        theta_x.add(0.5 * div_x * grid.dt);
                        theta_y.add(0.5 * div_y * grid.dt);
                    }
                    zx.swap(zx_next);
                    zy.swap(zy_next);
                    if (crossing) break;
                }
                const double tx = theta_x.value();
                const double ty = theta_y.value();
                if (!std::isfinite(tx) || !std::isfinite(ty))
                    throw_path_nonfinite("action phase", i);
                // |e^{-i tx} - e^{-i ty}| = 2 |sin((tx - ty)/2)|
                m.add(2.0 * std::abs(std::sin(0.5 * (tx - ty))), 0.0);
            }
            return m;
        });
    const ComplexMoments total = tree_reduce(partials);
    return finish_estimate(total, query.seed, query.stream_base);
}

double coupling_rhs(const MagneticConstant& constant, double t, double q, double delta,
                    double c0) {
    if (!(q > 1.0)) throw DomainError("coupling_rhs: q must exceed 1");
    if (!(t > 0.0) || !(delta >= 0.0) || !(c0 > 0.0))
        throw DomainError("coupling_rhs: need t > 0, delta >= 0, c0 > 0");
    const double q_conj = q / (q - 1.0);
    return c0 * constant.total() * std::pow(t, -0.5 / q_conj) * std::pow(delta, 1.0 / q_conj);
}

EigenResidual eigen_residual(const FieldSpec& field, const Psi& psi, double energy,
                             std::span<const double> x, const SemigroupQuery& query,
                             const Exec& exec) {
    EigenResidual out;
    out.estimate = evaluate(field, psi, x, query, exec);
    const std::complex<double> psi_x = psi.eval(x);
    out.reference = std::exp(-query.grid.t_end * energy) * psi_x.real();
    out.residual = std::abs(out.estimate.mean - std::complex<double>{out.reference, 0.0});
    const double denom = std::abs(out.reference);
    out.rel_error = denom > 0.0 ? out.residual / denom : out.residual;
    return out;
}

} // namespace fkmc
