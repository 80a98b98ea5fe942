#include "fkmc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fkmc/action.hpp"
#include "fkmc/coupling.hpp"
#include "fkmc/errors.hpp"
#include "fkmc/kahan.hpp"

namespace fkmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream layout inside one experiment: cell index in the upper bits, path
// index in the lower bits, so no two cells ever share a stream.
constexpr std::uint64_t kCellStride = std::uint64_t{1} << 40;
constexpr std::uint64_t kIndependentOffset = std::uint64_t{1} << 39;
constexpr std::uint64_t kBridgeLevelStride = std::uint64_t{1} << 32;

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string join(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ' ';
        out += fmt_g(vs[i]);
    }
    return out;
}

std::vector<double> offset_point(const std::vector<double>& base,
                                 const std::vector<double>& axis, double h) {
    std::vector<double> p(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) p[i] = base[i] + h * axis[i];
    return p;
}

void require_unit_axis(const std::vector<double>& axis) {
    double n2 = 0.0;
    for (double a : axis) n2 += a * a;
    if (std::abs(n2 - 1.0) > 1e-9)
        throw DomainError("pair axis must be a unit vector");
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Log-log slope, or NaN when the data does not support one.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 2) return kNaN;
    const double first = lx.front();
    bool varies = false;
    for (double v : lx)
        if (v != first) varies = true;
    if (!varies) return kNaN;
    return fit_line(lx, ly).slope;
}

} // namespace

void PairSet::validate() const {
    if (axis.empty()) throw DomainError("PairSet: empty axis");
    require_unit_axis(axis);
    if (bases.empty()) throw DomainError("PairSet: need at least one base point");
    for (const auto& b : bases)
        if (b.size() != axis.size())
            throw DomainError("PairSet: base dimension does not match the axis");
    if (distances.empty()) throw DomainError("PairSet: empty distance ladder");
    for (double d : distances)
        if (!(d > 0.0)) throw DomainError("PairSet: distances must be positive");
    std::vector<double> uniq = distances;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 4)
        throw DomainError("PairSet: need at least 4 distinct distance scales");
}

ReportTable coupling_bound_experiment(const FieldSpec& field, const CouplingBoundSpec& spec,
                                      const Exec& exec) {
    if (spec.t_values.empty() || spec.deltas.empty())
        throw DomainError("coupling bound scan: empty t or delta grid");
    if (static_cast<int>(spec.base.size()) != field.dim ||
        static_cast<int>(spec.axis.size()) != field.dim)
        throw DomainError("coupling bound scan: base/axis dimension mismatch");
    require_unit_axis(spec.axis);
    if (!(spec.dt > 0.0) || spec.n_paths <= 0)
        throw DomainError("coupling bound scan: need dt > 0 and paths > 0");
    for (double d : spec.deltas)
        if (!(d > 0.0)) throw DomainError("coupling bound scan: deltas must be positive");

    const std::size_t nt = spec.t_values.size();
    const std::size_t nd = spec.deltas.size();
    std::vector<MagneticConstant> constants(nt);
    for (std::size_t ti = 0; ti < nt; ++ti)
        constants[ti] =
            magnetic_constant(field, spec.t_values[ti], spec.q, spec.lattice, spec.quad);

    std::vector<double> lhs(nt * nd), lhs_se(nt * nd), rhs(nt * nd);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double t = spec.t_values[ti];
        const TimeGrid grid = TimeGrid::from_dt(t, spec.dt);
        for (std::size_t di = 0; di < nd; ++di) {
            const double delta = spec.deltas[di];
            const auto x = offset_point(spec.base, spec.axis, 0.5 * delta);
            const auto y = offset_point(spec.base, spec.axis, -0.5 * delta);
            SemigroupQuery query;
            query.grid = grid;
            query.n_paths = spec.n_paths;
            query.seed = spec.seed;
            query.stream_base = static_cast<std::uint64_t>(ti * nd + di) * kCellStride;
            query.clamp_warn_rate = spec.clamp_warn_rate;
            const McEstimate est = coupling_lhs(field, x, y, query, exec);
            const std::size_t c = ti * nd + di;
            lhs[c] = est.real();
            lhs_se[c] = est.std_error;
            rhs[c] = coupling_rhs(constants[ti], t, spec.q, delta, spec.c0);
        }
    }

    std::vector<double> slope_vs_delta(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        std::vector<double> ys(nd);
        for (std::size_t di = 0; di < nd; ++di) ys[di] = lhs[ti * nd + di];
        slope_vs_delta[ti] = loglog_slope(spec.deltas, ys);
    }
    std::vector<double> slope_vs_t(nd);
    for (std::size_t di = 0; di < nd; ++di) {
        std::vector<double> ys(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) ys[ti] = lhs[ti * nd + di];
        slope_vs_t[di] = loglog_slope(spec.t_values, ys);
    }

    ReportTable table;
    table.columns = {"t",   "delta",          "lhs",        "lhs_se",  "rhs",
                     "lhs_over_rhs", "slope_vs_delta", "slope_vs_t", "c_const", "c_a_term",
                     "c_div_term"};
    double worst_ratio = 0.0;
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < nt; ++ti) {
        for (std::size_t di = 0; di < nd; ++di) {
            const std::size_t c = ti * nd + di;
            const double ratio = rhs[c] > 0.0 ? lhs[c] / rhs[c] : kNaN;
            if (std::isfinite(ratio)) worst_ratio = std::max(worst_ratio, ratio);
            table.rows.push_back({spec.t_values[ti], spec.deltas[di], lhs[c], lhs_se[c], rhs[c],
                                  ratio, slope_vs_delta[ti], slope_vs_t[di],
                                  constants[ti].total(), constants[ti].a_term,
                                  constants[ti].div_term});
        }
        if (std::isfinite(slope_vs_delta[ti])) min_slope = std::min(min_slope, slope_vs_delta[ti]);
    }
    table.provenance.push_back("coupling bound scan: field=" + field.name +
                               " dim=" + std::to_string(field.dim));
    table.provenance.push_back("pairs per cell=" + std::to_string(spec.n_paths) +
                               " dt=" + fmt_g(spec.dt) + " seed=" + std::to_string(spec.seed) +
                               " c0=" + fmt_g(spec.c0) + " q=" + fmt_g(spec.q));
    table.provenance.push_back("t values: " + join(spec.t_values));
    table.provenance.push_back("deltas: " + join(spec.deltas));
    table.provenance.push_back("base: " + join(spec.base) + "  axis: " + join(spec.axis));
    for (std::size_t ti = 0; ti < nt; ++ti)
        table.provenance.push_back("C(t=" + fmt_g(spec.t_values[ti]) +
                                   ") = " + fmt_g(constants[ti].total()) + " (field term " +
                                   fmt_g(constants[ti].a_term) + ", divergence term " +
                                   fmt_g(constants[ti].div_term) + ")");
    std::ostringstream head;
    head << "coupling bound: max lhs/rhs = " << fmt_g(worst_ratio) << ", min slope vs delta = "
         << fmt_g(std::isfinite(min_slope) ? min_slope : kNaN);
    table.headline = head.str();
    return table;
}

namespace {

struct SmoothingCell {
    double t = 0.0;
    std::size_t base_index = 0;
    double delta = 0.0;
    double diff = 0.0;
    double diff_se = 0.0;
    double phase_mean = 0.0;
    double phase_se = 0.0;
    double rough_mean = 0.0;
    double rough_se = 0.0;
    double var_coupled = kNaN;
    double var_independent = kNaN;
};

ReportTable smoothing_table(const SmoothingExperimentSpec& spec,
                            const std::vector<SmoothingCell>& cells,
                            const std::string& source_line) {
    const std::size_t nt = spec.t_values.size();
    const std::size_t per_t = cells.size() / nt;
    std::vector<double> seminorm(nt, 0.0);
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t j = 0; j < per_t; ++j) {
            const auto& cell = cells[ti * per_t + j];
            seminorm[ti] =
                std::max(seminorm[ti], cell.diff / std::pow(cell.delta, spec.beta));
        }
    const double slope_t = loglog_slope(spec.t_values, seminorm);

    ReportTable table;
    table.columns = {"t",          "base_index", "delta",       "diff",
                     "diff_se",    "phase_term", "phase_se",    "rough_term",
                     "rough_se",   "cell_ratio", "seminorm_t",  "slope_t",
                     "var_coupled", "var_independent", "var_ratio"};
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t j = 0; j < per_t; ++j) {
            const auto& cell = cells[ti * per_t + j];
            const double ratio = cell.diff / std::pow(cell.delta, spec.beta);
            const double var_ratio = std::isfinite(cell.var_independent) &&
                                             cell.var_independent > 0.0
                                         ? cell.var_coupled / cell.var_independent
                                         : kNaN;
            table.rows.push_back({cell.t, static_cast<double>(cell.base_index), cell.delta,
                                  cell.diff, cell.diff_se, cell.phase_mean, cell.phase_se,
                                  cell.rough_mean, cell.rough_se, ratio, seminorm[ti], slope_t,
                                  cell.var_coupled, cell.var_independent, var_ratio});
        }
    table.provenance.push_back(source_line);
    table.provenance.push_back("beta=" + fmt_g(spec.beta) +
                               " pairs per cell=" + std::to_string(spec.n_paths) +
                               " dt=" + fmt_g(spec.dt) + " seed=" + std::to_string(spec.seed));
    table.provenance.push_back("t values: " + join(spec.t_values));
    table.provenance.push_back("distances: " + join(spec.pairs.distances));
    table.provenance.push_back("axis: " + join(spec.pairs.axis) +
                               "  bases: " + std::to_string(spec.pairs.bases.size()));
    std::ostringstream head;
    head << "smoothing: seminorm slope vs t = " << fmt_g(slope_t) << " at beta = "
         << fmt_g(spec.beta);
    table.headline = head.str();
    return table;
}

} // namespace

ReportTable smoothing_experiment(const FieldSpec& field, const Psi& psi,
                                 const SmoothingExperimentSpec& spec, const Exec& exec) {
    spec.pairs.validate();
    if (spec.pairs.dim() != field.dim)
        throw DomainError("smoothing scan: pair dimension does not match the field");
    if (!(spec.beta > 0.0) || !(spec.beta < 1.0))
        throw DomainError("smoothing scan: beta must lie in (0,1)");
    if (spec.t_values.empty()) throw DomainError("smoothing scan: empty t grid");
    if (!(spec.dt > 0.0) || spec.n_paths <= 0)
        throw DomainError("smoothing scan: need dt > 0 and paths > 0");

    std::vector<SmoothingCell> cells;
    std::uint64_t cell_index = 0;
    for (double t : spec.t_values) {
        const TimeGrid grid = TimeGrid::from_dt(t, spec.dt);
        for (std::size_t bi = 0; bi < spec.pairs.bases.size(); ++bi) {
            for (double delta : spec.pairs.distances) {
                const auto x = offset_point(spec.pairs.bases[bi], spec.pairs.axis, 0.5 * delta);
                const auto y = offset_point(spec.pairs.bases[bi], spec.pairs.axis, -0.5 * delta);
                SemigroupQuery query;
                query.grid = grid;
                query.n_paths = spec.n_paths;
                query.seed = spec.seed;
                query.stream_base = cell_index * kCellStride;
                query.clamp_warn_rate = spec.clamp_warn_rate;
                const PairDifferenceEstimate est =
                    evaluate_pair_difference(field, psi, x, y, query, exec);
                SmoothingCell cell;
                cell.t = t;
                cell.base_index = bi;
                cell.delta = delta;
                cell.diff = std::abs(est.difference.mean);
                cell.diff_se = est.difference.std_error;
                cell.phase_mean = est.phase_term_mean;
                cell.phase_se = est.phase_term_se;
                cell.rough_mean = est.rough_term_mean;
                cell.rough_se = est.rough_term_se;
                cell.var_coupled = est.var_coupled;
                if (spec.compare_variance && delta <= spec.variance_delta_max) {
                    SemigroupQuery iq = query;
                    iq.stream_base = cell_index * kCellStride + kIndependentOffset;
                    const PairDifferenceEstimate indep =
                        evaluate_pair_difference_independent(field, psi, x, y, iq, exec);
                    cell.var_independent = indep.var_coupled;
                }
                cells.push_back(cell);
                ++cell_index;
            }
        }
    }
    return smoothing_table(spec, cells,
                           "smoothing scan: field=" + field.name +
                               " dim=" + std::to_string(field.dim) + " (coupled pairs)");
}

ReportTable smoothing_closed_form(const SmoothingExperimentSpec& spec) {
    spec.pairs.validate();
    if (!(spec.beta > 0.0) || !(spec.beta < 1.0))
        throw DomainError("smoothing scan: beta must lie in (0,1)");
    if (spec.t_values.empty()) throw DomainError("smoothing scan: empty t grid");

    // Free heat semigroup applied to the indicator of {z . axis > 0}: the
    // pair difference depends only on the signed offsets along the axis.
    std::vector<SmoothingCell> cells;
    for (double t : spec.t_values) {
        if (!(t > 0.0)) throw DomainError("smoothing scan: t values must be positive");
        for (std::size_t bi = 0; bi < spec.pairs.bases.size(); ++bi) {
            double s_base = 0.0;
            for (std::size_t c = 0; c < spec.pairs.axis.size(); ++c)
                s_base += spec.pairs.bases[bi][c] * spec.pairs.axis[c];
            for (double delta : spec.pairs.distances) {
                const double hi = norm_cdf((s_base + 0.5 * delta) / std::sqrt(t));
                const double lo = norm_cdf((s_base - 0.5 * delta) / std::sqrt(t));
                SmoothingCell cell;
                cell.t = t;
                cell.base_index = bi;
                cell.delta = delta;
                cell.diff = hi - lo;
                cell.rough_mean = cell.diff;
                cells.push_back(cell);
            }
        }
    }
    return smoothing_table(spec, cells,
                           "smoothing scan: closed-form heat semigroup on a half-space "
                           "indicator (no sampling; se columns are zero)");
}

namespace {

// Coupling construction on a path whose increments are already fixed; the
// bridge stream supplies only the crossing uniforms.
CoupledPaths couple_given_path(const MirrorGeometry& geom, BrownianPath x_path,
                               RngStream& bridge) {
    const TimeGrid grid = x_path.grid;
    const int d = x_path.dim;
    CoupledPaths pair;
    pair.y_path.grid = grid;
    pair.y_path.dim = d;
    pair.y_path.pts.resize(x_path.pts.size());
    geom.reflect(x_path.point(0), pair.y_path.point(0));
    bool coupled = false;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        if (!coupled) {
            const double s0 = geom.signed_dist(x_path.point(k));
            const double s1 = geom.signed_dist(x_path.point(k + 1));
            bool crossing = s1 <= 0.0;
            if (!crossing)
                crossing = bridge.u01() < std::exp(-2.0 * s0 * s1 / grid.dt);
            if (crossing) {
                coupled = true;
                pair.tau_step = k + 1;
                pair.tau_time = grid.time(k + 1);
            }
        }
        if (coupled)
            std::copy(x_path.point(k + 1), x_path.point(k + 1) + d, pair.y_path.point(k + 1));
        else
            geom.reflect(x_path.point(k + 1), pair.y_path.point(k + 1));
    }
    pair.x_path = std::move(x_path);
    return pair;
}

struct LadderLevelAcc {
    KahanSum sq;
    KahanSum abs;
    double max_abs = 0.0;
    std::int64_t coupled = 0;
};

struct LadderPartial {
    std::vector<LadderLevelAcc> levels;
    std::int64_t n = 0;

    LadderPartial operator+(const LadderPartial& o) const {
        if (levels.empty()) return o;
        if (o.levels.empty()) return *this;
        LadderPartial r = *this;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            r.levels[l].sq.add(o.levels[l].sq.value());
            r.levels[l].abs.add(o.levels[l].abs.value());
            r.levels[l].max_abs = std::max(r.levels[l].max_abs, o.levels[l].max_abs);
            r.levels[l].coupled += o.levels[l].coupled;
        }
        r.n += o.n;
        return r;
    }
};

} // namespace

ReportTable residual_ladder_experiment(const FieldSpec& field, const ResidualLadderSpec& spec,
                                       const Exec& exec) {
    if (spec.dt_ladder.empty()) throw DomainError("residual ladder: empty dt ladder");
    for (std::size_t i = 1; i < spec.dt_ladder.size(); ++i)
        if (!(spec.dt_ladder[i] < spec.dt_ladder[i - 1]))
            throw DomainError("residual ladder: dt ladder must decrease");
    if (!(spec.t > 0.0)) throw DomainError("residual ladder: t must be positive");
    if (spec.n_paths <= 0) throw DomainError("residual ladder: need paths > 0");
    const MirrorGeometry geom = MirrorGeometry::make(spec.x, spec.y);
    if (geom.dim != field.dim)
        throw DomainError("residual ladder: pair dimension does not match the field");

    const std::size_t n_levels = spec.dt_ladder.size();
    const double dt_fine = spec.dt_ladder.back();
    const std::int64_t n_fine = static_cast<std::int64_t>(std::llround(spec.t / dt_fine));
    if (std::abs(static_cast<double>(n_fine) * dt_fine - spec.t) > 1e-9 * spec.t)
        throw DomainError("residual ladder: finest dt must divide t");
    std::vector<std::int64_t> ratios(n_levels);
    std::vector<TimeGrid> grids;
    grids.reserve(n_levels);
    for (std::size_t l = 0; l < n_levels; ++l) {
        ratios[l] = static_cast<std::int64_t>(std::llround(spec.dt_ladder[l] / dt_fine));
        if (ratios[l] < 1 ||
            std::abs(static_cast<double>(ratios[l]) * dt_fine - spec.dt_ladder[l]) >
                1e-9 * spec.dt_ladder[l])
            throw DomainError("residual ladder: each dt must be a multiple of the finest");
        if (n_fine % ratios[l] != 0)
            throw DomainError("residual ladder: each dt must divide t");
        grids.push_back(TimeGrid::make(spec.t, n_fine / ratios[l]));
    }

    const int d = geom.dim;
    const double sdt_fine = std::sqrt(dt_fine);
    auto partials = run_blocks<LadderPartial>(
        exec, spec.n_paths, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            LadderPartial part;
            part.levels.resize(n_levels);
            std::vector<double> fine_inc(static_cast<std::size_t>(n_fine * d));
            std::vector<BrownianPath> paths(n_levels);
            for (std::size_t l = 0; l < n_levels; ++l) {
                paths[l].grid = grids[l];
                paths[l].dim = d;
                paths[l].pts.resize(static_cast<std::size_t>((grids[l].n_steps + 1) * d));
            }
            for (std::int64_t i = begin; i < end; ++i) {
                RngStream rng(spec.seed,
                              static_cast<std::uint64_t>(i)); // driver normals
                for (auto& v : fine_inc) v = sdt_fine * rng.normal();
                for (std::size_t l = 0; l < n_levels; ++l) {
                    BrownianPath& path = paths[l];
                    std::copy(geom.x.begin(), geom.x.end(), path.point(0));
                    // Coarse increments are sums of the finest ones.
                    std::int64_t f = 0;
                    for (std::int64_t k = 0; k < path.grid.n_steps; ++k) {
                        double* prev = path.point(k);
                        double* next = path.point(k + 1);
                        std::copy(prev, prev + d, next);
                        for (std::int64_t r = 0; r < ratios[l]; ++r, ++f)
                            for (int c = 0; c < d; ++c)
                                next[c] += fine_inc[static_cast<std::size_t>(f * d + c)];
                    }
                    RngStream bridge(spec.seed, kIndependentOffset +
                                                    static_cast<std::uint64_t>(l) *
                                                        kBridgeLevelStride +
                                                    static_cast<std::uint64_t>(i));
                    CoupledPaths pair = couple_given_path(geom, std::move(path), bridge);
                    const ActionDecomposition dec =
                        decompose_coupled_action(field, geom, pair);
                    LadderLevelAcc& acc = part.levels[l];
                    acc.sq.add(dec.residual * dec.residual);
                    acc.abs.add(std::abs(dec.residual));
                    acc.max_abs = std::max(acc.max_abs, std::abs(dec.residual));
                    if (pair.coupled()) ++acc.coupled;
                    paths[l] = std::move(pair.x_path); // return the buffer
                }
                ++part.n;
            }
            return part;
        });
    const LadderPartial total = tree_reduce(partials);

    ReportTable table;
    table.columns = {"dt",       "n_steps",  "ms_residual",     "rms_residual",
                     "mean_abs", "max_abs",  "coupled_fraction"};
    bool monotone = true;
    double prev_ms = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < n_levels; ++l) {
        const double n = static_cast<double>(total.n);
        const double ms = total.levels[l].sq.value() / n;
        if (!(ms <= prev_ms)) monotone = false;
        prev_ms = ms;
        table.rows.push_back({spec.dt_ladder[l], static_cast<double>(grids[l].n_steps), ms,
                              std::sqrt(ms), total.levels[l].abs.value() / n,
                              total.levels[l].max_abs,
                              static_cast<double>(total.levels[l].coupled) / n});
    }
    table.provenance.push_back("coupled-action residual ladder: field=" + field.name +
                               " dim=" + std::to_string(field.dim));
    table.provenance.push_back("pairs=" + std::to_string(spec.n_paths) +
                               " t=" + fmt_g(spec.t) + " seed=" + std::to_string(spec.seed));
    table.provenance.push_back("dt ladder: " + join(spec.dt_ladder));
    table.provenance.push_back("x: " + join(spec.x) + "  y: " + join(spec.y));
    table.provenance.push_back(
        "matched drivers: coarse increments are partial sums of the finest level");
    std::ostringstream head;
    head << "coupled-action residual: finest ms = " << fmt_g(prev_ms)
         << (monotone ? " (monotone in dt)" : " (NOT monotone in dt)");
    table.headline = head.str();
    return table;
}

} // namespace fkmc
