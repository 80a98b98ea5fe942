#include "fkmc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fkmc/csv.hpp"
#include "fkmc/potentials.hpp"
#include "fkmc/semigroup.hpp"
#include "fkmc/svg.hpp"

namespace fkmc {

namespace {

constexpr std::uint64_t kCellStride = std::uint64_t{1} << 40;

FieldSpec build_field(const RunConfig& cfg) {
    FieldSpec field;
    if (cfg.field == "zero") {
        if (cfg.dim < 1) throw ConfigError("zero field needs an explicit dim");
        field.dim = cfg.dim;
        field.name = "zero";
    } else if (cfg.field == "smooth_bump") {
        const int dim = cfg.dim > 0 ? cfg.dim : 2;
        field = smooth_bump(dim, cfg.amplitude, cfg.radius);
    } else if (cfg.field == "constant_field" || cfg.field == "landau") {
        if (cfg.dim != 0 && cfg.dim != 2)
            throw ConfigError("constant field lives on R^2");
        field = constant_field_2d(cfg.b_field);
    } else if (cfg.field == "coulomb") {
        ParticleConfig pc;
        pc.n_electrons = cfg.electrons;
        pc.nuclei = cfg.nuclei;
        pc.charges = cfg.charges;
        if (pc.nuclei.empty()) {
            pc.nuclei = {{0.0, 0.0, 0.0}};
            pc.charges = {1.0};
        }
        field = coulomb_potential(pc);
        if (cfg.dim != 0 && cfg.dim != field.dim)
            throw ConfigError("coulomb dim is fixed by the electron count");
    } else {
        throw ConfigError("unknown field '" + cfg.field + "'");
    }
    if (cfg.clamp) field.clamp = *cfg.clamp;
    if (cfg.beta) field.beta = *cfg.beta;
    return field;
}

Psi build_psi(const RunConfig& cfg, const FieldSpec& field) {
    Psi psi;
    if (cfg.psi == "one") {
        psi.eval = [](std::span<const double>) { return std::complex<double>{1.0, 0.0}; };
        psi.is_real = true;
    } else if (cfg.psi == "gaussian") {
        const double inv2s2 = 1.0 / (2.0 * cfg.psi_sigma * cfg.psi_sigma);
        const int axis = cfg.psi_axis;
        const double offset = cfg.psi_offset;
        psi.eval = [inv2s2, axis, offset](std::span<const double> z) {
            double n2 = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double c = z[i] - (static_cast<int>(i) == axis ? offset : 0.0);
                n2 += c * c;
            }
            return std::complex<double>{std::exp(-n2 * inv2s2), 0.0};
        };
        psi.is_real = true;
    } else if (cfg.psi == "half_space") {
        const int axis = cfg.psi_axis;
        const double offset = cfg.psi_offset;
        psi.eval = [axis, offset](std::span<const double> z) {
            return std::complex<double>{z[static_cast<std::size_t>(axis)] > offset ? 1.0 : 0.0,
                                        0.0};
        };
        psi.is_real = true;
    } else if (cfg.psi == "landau_ground") {
        const double b = cfg.b_field;
        psi.eval = [b](std::span<const double> z) {
            double n2 = 0.0;
            for (double c : z) n2 += c * c;
            return std::complex<double>{std::exp(-0.25 * b * n2), 0.0};
        };
        psi.is_real = true;
    } else {
        throw ConfigError("unknown psi '" + cfg.psi + "'");
    }
    if (cfg.psi_axis >= field.dim)
        throw ConfigError("psi_axis is out of range for the field dimension");
    return psi;
}

std::optional<LatticeSpec> build_lattice(const RunConfig& cfg) {
    if (cfg.lattice_extent > 0.0 && cfg.lattice_per_axis >= 2)
        return LatticeSpec{cfg.lattice_extent, cfg.lattice_per_axis};
    return std::nullopt;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Exact free heat semigroup of the configured data, for heat_check.
double heat_exact(const RunConfig& cfg, const FieldSpec& field,
                  const std::vector<double>& x, double t) {
    if (cfg.psi == "one") return 1.0;
    if (cfg.psi == "gaussian") {
        const double s2 = cfg.psi_sigma * cfg.psi_sigma;
        double n2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double c = x[i] - (static_cast<int>(i) == cfg.psi_axis ? cfg.psi_offset : 0.0);
            n2 += c * c;
        }
        return std::pow(s2 / (s2 + t), 0.5 * field.dim) * std::exp(-n2 / (2.0 * (s2 + t)));
    }
    if (cfg.psi == "half_space") {
        const double s = x[static_cast<std::size_t>(cfg.psi_axis)] - cfg.psi_offset;
        return norm_cdf(s / std::sqrt(t));
    }
    throw ConfigError("heat_check: no closed form for psi '" + cfg.psi + "'");
}

ReportTable run_heat_check(const RunConfig& cfg, const FieldSpec& field, const Exec& exec) {
    if (field.has_vector() || field.has_scalar())
        throw ConfigError("heat_check needs the zero field");
    if (cfg.points.empty()) throw ConfigError("heat_check: no evaluation points");
    if (cfg.t_values.empty()) throw ConfigError("heat_check: no t values");
    if (!(cfg.dt > 0.0) || cfg.n_paths < 1)
        throw ConfigError("heat_check: need dt > 0 and n_paths >= 1");
    const Psi psi = build_psi(cfg, field);
    ReportTable table;
    table.columns = {"point_index", "t", "mc", "mc_se", "exact", "abs_err", "sigma_err"};
    double worst_sigma = 0.0;
    std::uint64_t cell = 0;
    for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
        const auto& x = cfg.points[pi];
        if (static_cast<int>(x.size()) != field.dim)
            throw ConfigError("heat_check: point dimension mismatch");
        for (double t : cfg.t_values) {
            SemigroupQuery query;
            query.grid = TimeGrid::from_dt(t, cfg.dt);
            query.n_paths = cfg.n_paths;
            query.seed = cfg.seed;
            query.stream_base = cell * kCellStride;
            query.clamp_warn_rate = cfg.clamp_warn_rate;
            const McEstimate est = evaluate(field, psi, x, query, exec);
            const double exact = heat_exact(cfg, field, x, t);
            const double err = std::abs(est.real() - exact);
            const double sig = est.std_error > 0.0 ? err / est.std_error : 0.0;
            worst_sigma = std::max(worst_sigma, sig);
            table.rows.push_back({static_cast<double>(pi), t, est.real(), est.std_error, exact,
                                  err, sig});
            ++cell;
        }
    }
    table.provenance.push_back("heat kernel spot check: psi=" + cfg.psi +
                               " dim=" + std::to_string(field.dim));
    table.provenance.push_back("n_paths=" + std::to_string(cfg.n_paths) +
                               " dt=" + fmt_g(cfg.dt) + " seed=" + std::to_string(cfg.seed));
    table.headline = "heat check: worst |err|/se = " + fmt_g(worst_sigma);
    return table;
}

ReportTable run_eigen_check(const RunConfig& cfg, const FieldSpec& field, const Exec& exec) {
    if (!field.has_vector()) throw ConfigError("eigen_check needs a vector potential");
    if (cfg.points.empty()) throw ConfigError("eigen_check: no evaluation points");
    if (cfg.t_values.empty()) throw ConfigError("eigen_check: no t values");
    if (!(cfg.dt > 0.0) || cfg.n_paths < 1)
        throw ConfigError("eigen_check: need dt > 0 and n_paths >= 1");
    const Psi psi = build_psi(cfg, field);
    ReportTable table;
    table.columns = {"point_index", "t",        "mc_re",    "mc_im",   "mc_se",
                     "reference",   "residual", "rel_error"};
    double worst_rel = 0.0;
    std::uint64_t cell = 0;
    for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
        const auto& x = cfg.points[pi];
        if (static_cast<int>(x.size()) != field.dim)
            throw ConfigError("eigen_check: point dimension mismatch");
        for (double t : cfg.t_values) {
            SemigroupQuery query;
            query.grid = TimeGrid::from_dt(t, cfg.dt);
            query.n_paths = cfg.n_paths;
            query.seed = cfg.seed;
            query.stream_base = cell * kCellStride;
            query.clamp_warn_rate = cfg.clamp_warn_rate;
            const EigenResidual res = eigen_residual(field, psi, cfg.energy, x, query, exec);
            worst_rel = std::max(worst_rel, res.rel_error);
            table.rows.push_back({static_cast<double>(pi), t, res.estimate.mean.real(),
                                  res.estimate.mean.imag(), res.estimate.std_error,
                                  res.reference, res.residual, res.rel_error});
            ++cell;
        }
    }
    table.provenance.push_back("eigenvalue relation check: field=" + field.name +
                               " energy=" + fmt_g(cfg.energy));
    table.provenance.push_back("n_paths=" + std::to_string(cfg.n_paths) +
                               " dt=" + fmt_g(cfg.dt) + " seed=" + std::to_string(cfg.seed));
    table.headline = "eigen check: worst rel error = " + fmt_g(worst_rel);
    return table;
}

ReportTable run_kato_probe(const RunConfig& cfg, const FieldSpec& field) {
    if (cfg.t_ladder.empty()) throw ConfigError("kato_probe: empty t ladder");
    ScalarField f;
    if (field.has_scalar())
        f = field.potential_magnitude();
    else if (field.has_vector())
        f = field.magnitude_power(1.0);
    else
        throw ConfigError("kato_probe: field has neither scalar nor vector part");
    std::vector<std::vector<double>> candidates = field.sup_candidates;
    for (const auto& p : cfg.points) {
        if (static_cast<int>(p.size()) != field.dim)
            throw ConfigError("kato_probe: candidate point dimension mismatch");
        candidates.push_back(p);
    }
    if (candidates.empty())
        candidates.push_back(std::vector<double>(static_cast<std::size_t>(field.dim), 0.0));
    QuadSpec quad;
    const KatoProbe probe =
        kato_membership_probe(f, cfg.alpha, cfg.t_ladder, candidates, quad);

    // Re-evaluate at the largest t to surface the maximizer.
    KatoQuery query;
    query.alpha = cfg.alpha;
    query.t = cfg.t_ladder.front();
    query.candidates = candidates;
    query.lattice = build_lattice(cfg);
    query.quad = quad;
    const KatoValue top = kato_functional(f, query);
    double max_norm = 0.0;
    for (double c : top.maximizer) max_norm += c * c;
    max_norm = std::sqrt(max_norm);

    ReportTable table;
    table.columns = {"t", "value", "finite", "decay_exponent", "passes", "maximizer_norm"};
    for (std::size_t i = 0; i < probe.t_ladder.size(); ++i)
        table.rows.push_back({probe.t_ladder[i], probe.values[i],
                              std::isfinite(probe.values[i]) ? 1.0 : 0.0,
                              probe.decay_exponent, probe.passes ? 1.0 : 0.0, max_norm});
    table.provenance.push_back("kato membership probe: field=" + field.name +
                               " integrand=" + f.name + " alpha=" + fmt_g(cfg.alpha));
    table.provenance.push_back("candidates=" + std::to_string(candidates.size()) +
                               (query.lattice ? " plus lattice" : ""));
    std::ostringstream head;
    head << "kato probe: " << (probe.passes ? "decaying" : "NOT decaying")
         << ", exponent = " << fmt_g(probe.decay_exponent) << ", sup at |z| = "
         << fmt_g(max_norm);
    table.headline = head.str();
    return table;
}

ReportTable dispatch(const RunConfig& cfg, const Exec& exec) {
    const FieldSpec field = build_field(cfg);
    if (cfg.command == "coupling_bound") {
        CouplingBoundSpec spec;
        spec.n_paths = cfg.n_paths;
        spec.dt = cfg.dt;
        spec.seed = cfg.seed;
        spec.clamp_warn_rate = cfg.clamp_warn_rate;
        spec.t_values = cfg.t_values;
        spec.deltas = cfg.deltas;
        if (cfg.bases.size() != 1)
            throw ConfigError("coupling_bound: give exactly one base point");
        spec.base = cfg.bases.front();
        spec.axis = cfg.axis;
        spec.c0 = cfg.c0;
        spec.q = cfg.effective_q();
        spec.lattice = build_lattice(cfg);
        return coupling_bound_experiment(field, spec, exec);
    }
    if (cfg.command == "smoothing" || cfg.command == "smoothing_exact") {
        SmoothingExperimentSpec spec;
        spec.n_paths = cfg.n_paths;
        spec.dt = cfg.dt;
        spec.seed = cfg.seed;
        spec.clamp_warn_rate = cfg.clamp_warn_rate;
        spec.t_values = cfg.t_values;
        spec.pairs.bases = cfg.bases;
        spec.pairs.axis = cfg.axis;
        spec.pairs.distances = cfg.deltas;
        spec.beta = cfg.effective_beta();
        spec.compare_variance = cfg.compare_variance;
        spec.variance_delta_max = cfg.variance_delta_max;
        if (cfg.command == "smoothing_exact") return smoothing_closed_form(spec);
        const Psi psi = build_psi(cfg, field);
        return smoothing_experiment(field, psi, spec, exec);
    }
    if (cfg.command == "residual_ladder") {
        ResidualLadderSpec spec;
        spec.n_paths = cfg.n_paths;
        spec.dt = cfg.dt;
        spec.seed = cfg.seed;
        spec.clamp_warn_rate = cfg.clamp_warn_rate;
        spec.dt_ladder = cfg.dt_ladder;
        if (cfg.t_values.size() != 1)
            throw ConfigError("residual_ladder: give exactly one t value");
        spec.t = cfg.t_values.front();
        if (cfg.bases.size() != 1 || cfg.deltas.size() != 1)
            throw ConfigError("residual_ladder: give one base and one delta");
        spec.x.resize(cfg.bases.front().size());
        spec.y.resize(cfg.bases.front().size());
        if (cfg.axis.size() != cfg.bases.front().size())
            throw ConfigError("residual_ladder: axis/base dimension mismatch");
        for (std::size_t i = 0; i < spec.x.size(); ++i) {
            spec.x[i] = cfg.bases.front()[i] + 0.5 * cfg.deltas.front() * cfg.axis[i];
            spec.y[i] = cfg.bases.front()[i] - 0.5 * cfg.deltas.front() * cfg.axis[i];
        }
        return residual_ladder_experiment(field, spec, exec);
    }
    if (cfg.command == "kato_probe") return run_kato_probe(cfg, field);
    if (cfg.command == "heat_check") return run_heat_check(cfg, field, exec);
    if (cfg.command == "eigen_check") return run_eigen_check(cfg, field, exec);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

// Threshold keys: max_<column> (value must stay <=) and min_<column> (>=),
// evaluated over all rows.
void apply_thresholds(const RunConfig& cfg, RunResult& result) {
    if (cfg.accept.empty()) return;
    result.thresholds_checked = true;
    std::ostringstream verdicts;
    for (const auto& [key, bound] : cfg.accept) {
        bool is_max = key.rfind("max_", 0) == 0;
        bool is_min = key.rfind("min_", 0) == 0;
        if (!is_max && !is_min)
            throw ConfigError("accept key '" + key + "' must start with max_ or min_");
        const std::string col = key.substr(4);
        const std::size_t ci = csv_column(result.table, col);
        double stat = is_max ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
        for (const auto& row : result.table.rows)
            stat = is_max ? std::max(stat, row[ci]) : std::min(stat, row[ci]);
        const bool ok = is_max ? stat <= bound : stat >= bound;
        if (!ok) result.thresholds_met = false;
        verdicts << "; " << key << (ok ? " ok (" : " FAILED (") << fmt_g(stat) << " vs "
                 << fmt_g(bound) << ")";
    }
    result.summary += verdicts.str();
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

std::string unique_path(const std::string& dir, const std::string& stem,
                        const std::string& ext) {
    std::string path = dir + "/" + stem + ext;
    int suffix = 2;
    while (std::filesystem::exists(path))
        path = dir + "/" + stem + "-" + std::to_string(suffix++) + ext;
    return path;
}

void build_plot(const RunConfig& cfg, const ReportTable& table,
                std::vector<PlotSeries>& series, PlotSpec& plot) {
    plot.title = cfg.command;
    plot.annotations.push_back(table.headline);
    auto col = [&](const std::string& name) { return csv_column(table, name); };
    if (cfg.command == "coupling_bound") {
        plot.x_label = "delta";
        plot.y_label = "E|w_X - w_Y| and bound";
        plot.log_x = true;
        plot.log_y = true;
        const std::size_t ct = col("t"), cd = col("delta"), cl = col("lhs"), cr = col("rhs");
        std::vector<double> ts;
        for (const auto& row : table.rows)
            if (std::find(ts.begin(), ts.end(), row[ct]) == ts.end()) ts.push_back(row[ct]);
        for (double t : ts) {
            PlotSeries lhs{"lhs t=" + fmt_g(t), {}, {}};
            PlotSeries rhs{"rhs t=" + fmt_g(t), {}, {}};
            for (const auto& row : table.rows)
                if (row[ct] == t) {
                    lhs.x.push_back(row[cd]);
                    lhs.y.push_back(row[cl]);
                    rhs.x.push_back(row[cd]);
                    rhs.y.push_back(row[cr]);
                }
            series.push_back(std::move(lhs));
            series.push_back(std::move(rhs));
        }
    } else if (cfg.command == "smoothing" || cfg.command == "smoothing_exact") {
        plot.x_label = "t";
        plot.y_label = "beta-seminorm";
        plot.log_x = true;
        plot.log_y = true;
        const std::size_t ct = col("t"), cs = col("seminorm_t");
        PlotSeries s{"seminorm", {}, {}};
        for (const auto& row : table.rows)
            if (s.x.empty() || s.x.back() != row[ct]) {
                s.x.push_back(row[ct]);
                s.y.push_back(row[cs]);
            }
        series.push_back(std::move(s));
    } else if (cfg.command == "residual_ladder") {
        plot.x_label = "dt";
        plot.y_label = "mean-square residual";
        plot.log_x = true;
        plot.log_y = true;
        const std::size_t cd = col("dt"), cm = col("ms_residual");
        PlotSeries s{"ms residual", {}, {}};
        for (const auto& row : table.rows) {
            s.x.push_back(row[cd]);
            s.y.push_back(row[cm]);
        }
        series.push_back(std::move(s));
    } else if (cfg.command == "kato_probe") {
        plot.x_label = "t";
        plot.y_label = "K_alpha";
        plot.log_x = true;
        plot.log_y = true;
        const std::size_t ct = col("t"), cv = col("value");
        PlotSeries s{"K_alpha", {}, {}};
        for (const auto& row : table.rows)
            if (std::isfinite(row[cv]) && row[cv] > 0.0) {
                s.x.push_back(row[ct]);
                s.y.push_back(row[cv]);
            }
        series.push_back(std::move(s));
    } else {
        plot.x_label = "t";
        plot.y_label = cfg.command == "eigen_check" ? "rel error" : "abs error";
        const std::size_t ct = col("t");
        const std::size_t ce = col(cfg.command == "eigen_check" ? "rel_error" : "abs_err");
        const std::size_t cp = col("point_index");
        std::vector<double> pts;
        for (const auto& row : table.rows)
            if (std::find(pts.begin(), pts.end(), row[cp]) == pts.end()) pts.push_back(row[cp]);
        for (double p : pts) {
            PlotSeries s{"point " + fmt_g(p), {}, {}};
            for (const auto& row : table.rows)
                if (row[cp] == p) {
                    s.x.push_back(row[ct]);
                    s.y.push_back(row[ce]);
                }
            series.push_back(std::move(s));
        }
    }
}

} // namespace

RunResult run_table_only(const RunConfig& cfg) {
    Exec exec{cfg.threads};
    RunResult result;
    result.table = dispatch(cfg, exec);
    result.summary = result.table.headline;
    apply_thresholds(cfg, result);
    result.exit_code = result.thresholds_met ? 0 : 1;
    return result;
}

RunResult run(const RunConfig& cfg) {
    RunResult result = run_table_only(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = cfg.command + "-" + utc_stamp();
    result.csv_path = unique_path(cfg.out_dir, stem, ".csv");
    csv_write_file(result.csv_path, result.table);
    if (cfg.svg) {
        // Rendered from the file just written, so the plot reflects exactly
        // what a reader of the CSV sees.
        const ReportTable readback = csv_read_file(result.csv_path);
        std::vector<PlotSeries> series;
        PlotSpec plot;
        build_plot(cfg, readback, series, plot);
        result.svg_path = unique_path(cfg.out_dir, stem, ".svg");
        std::ofstream svg(result.svg_path, std::ios::binary);
        if (!svg) throw ConfigError("cannot open " + result.svg_path);
        svg << emit_svg(series, plot);
    }
    std::ofstream log(cfg.out_dir + "/run.log", std::ios::app);
    if (log) {
        log << utc_stamp() << " command=" << cfg.command << " seed=" << cfg.seed
            << " threads=" << cfg.threads << " csv=" << result.csv_path;
        if (!result.svg_path.empty()) log << " svg=" << result.svg_path;
        log << "\n  " << result.summary << "\n";
        if (result.thresholds_checked)
            log << "  thresholds " << (result.thresholds_met ? "met" : "FAILED") << "\n";
    }
    return result;
}

} // namespace fkmc
