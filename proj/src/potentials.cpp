#include "fkmc/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fkmc/errors.hpp"

namespace fkmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dist3(const double* a, const double* b) {
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    const double d2 = a[2] - b[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

} // namespace

void ParticleConfig::validate() const {
    if (n_electrons < 1) throw DomainError("ParticleConfig: need at least one electron");
    if (nuclei.size() != charges.size())
        throw DomainError("ParticleConfig: nuclei and charges must align");
    for (const auto& r : nuclei)
        if (r.size() != 3) throw DomainError("ParticleConfig: nuclei live in R^3");
    for (double z : charges)
        if (!(z > 0.0)) throw DomainError("ParticleConfig: charges must be positive");
    for (std::size_t i = 0; i < nuclei.size(); ++i)
        for (std::size_t j = i + 1; j < nuclei.size(); ++j)
            if (dist3(nuclei[i].data(), nuclei[j].data()) == 0.0)
                throw DomainError("ParticleConfig: nuclei positions must be distinct");
}

FieldSpec coulomb_potential(const ParticleConfig& config) {
    config.validate();
    FieldSpec field;
    field.dim = config.dim();
    field.name = "coulomb";
    const auto nuclei = config.nuclei;
    const auto charges = config.charges;
    const int n = config.n_electrons;
    field.scalar_potential = [nuclei, charges, n](std::span<const double> x) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            const double* xi = x.data() + 3 * i;
            for (std::size_t j = 0; j < nuclei.size(); ++j) {
                const double d = dist3(xi, nuclei[j].data());
                v -= d == 0.0 ? kInf : charges[j] / d;
            }
            for (int k = i + 1; k < n; ++k) {
                const double d = dist3(xi, x.data() + 3 * k);
                v += d == 0.0 ? kInf : 1.0 / d;
            }
        }
        return v;
    };
    // Radial structure only in the single-electron, single-nucleus-at-origin
    // case, where |V| = Z / r.
    if (n == 1 && nuclei.size() == 1 && nuclei[0][0] == 0.0 && nuclei[0][1] == 0.0 &&
        nuclei[0][2] == 0.0) {
        const double z0 = charges[0];
        field.abs_v_radial = [z0](double r) { return r == 0.0 ? kInf : z0 / r; };
        field.v_singular_origin = true;
    }
    field.sup_candidates.push_back(std::vector<double>(static_cast<std::size_t>(field.dim), 0.0));
    for (std::size_t j = 0; j < nuclei.size(); ++j) {
        std::vector<double> cand(static_cast<std::size_t>(field.dim), 0.0);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c) cand[static_cast<std::size_t>(3 * i + c)] = nuclei[j][static_cast<std::size_t>(c)];
        field.sup_candidates.push_back(std::move(cand));
    }
    return field;
}

FieldSpec lift_single_particle(const FieldSpec& one_particle, int n_particles) {
    if (one_particle.dim != 3)
        throw DomainError("lift_single_particle: one-particle field must live on R^3");
    if (!one_particle.has_vector())
        throw DomainError("lift_single_particle: missing vector potential");
    if (n_particles < 1) throw DomainError("lift_single_particle: need n >= 1");
    FieldSpec field;
    field.dim = 3 * n_particles;
    field.name = one_particle.name + "-lift" + std::to_string(n_particles);
    field.beta = one_particle.beta;
    field.globally_kato = one_particle.globally_kato;
    const VectorFn a = one_particle.vector_potential;
    const int n = n_particles;
    field.vector_potential = [a, n](std::span<const double> x, std::span<double> out) {
        for (int i = 0; i < n; ++i)
            a(x.subspan(static_cast<std::size_t>(3 * i), 3),
              out.subspan(static_cast<std::size_t>(3 * i), 3));
    };
    if (one_particle.div_a) {
        const ScalarFn d = one_particle.div_a;
        field.div_a = [d, n](std::span<const double> x) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += d(x.subspan(static_cast<std::size_t>(3 * i), 3));
            return sum;
        };
    }
    // Block copies of the one-particle candidates remain natural sup
    // candidates after lifting.
    for (const auto& cand : one_particle.sup_candidates) {
        std::vector<double> lifted(static_cast<std::size_t>(field.dim), 0.0);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                lifted[static_cast<std::size_t>(3 * i + c)] = cand[static_cast<std::size_t>(c)];
        field.sup_candidates.push_back(std::move(lifted));
    }
    return field;
}

FieldSpec constant_field_2d(double b) {
    FieldSpec field;
    field.dim = 2;
    field.name = "constant_field_2d";
    field.vector_potential = [b](std::span<const double> x, std::span<double> out) {
        out[0] = -0.5 * b * x[1];
        out[1] = 0.5 * b * x[0];
    };
    field.div_a = [](std::span<const double>) { return 0.0; };
    field.abs_a_radial = [b](double r) { return 0.5 * std::abs(b) * r; };
    // |A| grows linearly: integrable locally but the spatial sup is infinite,
    // so experiments must window their evaluations.
    field.globally_kato = false;
    field.sup_candidates.push_back({0.0, 0.0});
    return field;
}

FieldSpec smooth_bump(int dim, double amplitude, double radius) {
    if (dim < 2) throw DomainError("smooth_bump: need dim >= 2");
    if (!(amplitude > 0.0) || !(radius > 0.0))
        throw DomainError("smooth_bump: amplitude and radius must be positive");
    FieldSpec field;
    field.dim = dim;
    field.name = "smooth_bump";

    // envelope(r) = exp(-1 / (1 - (r/radius)^2)) inside, 0 outside; the
    // field is c * envelope(|x|) * (-x2, x1, 0, ...), divergence-free for
    // any radial envelope. c normalizes max |A| to the amplitude.
    const double r2max = radius * radius;
    auto envelope = [r2max](double rho2) {
        if (rho2 >= r2max) return 0.0;
        return std::exp(-1.0 / (1.0 - rho2 / r2max));
    };
    double peak = 0.0;
    for (int i = 1; i < 4096; ++i) {
        const double r = radius * i / 4096.0;
        peak = std::max(peak, r * envelope(r * r));
    }
    const double c = amplitude / peak;

    field.vector_potential = [c, envelope](std::span<const double> x, std::span<double> out) {
        double rho2 = 0.0;
        for (double v : x) rho2 += v * v;
        const double e = c * envelope(rho2);
        out[0] = -e * x[1];
        out[1] = e * x[0];
        for (std::size_t i = 2; i < out.size(); ++i) out[i] = 0.0;
    };
    field.div_a = [](std::span<const double>) { return 0.0; };
    if (dim == 2) {
        field.abs_a_radial = [c, envelope](double r) { return c * r * envelope(r * r); };
    }
    // Ring of maximal |A| plus a radial scan as sup candidates.
    for (int i = 0; i <= 12; ++i) {
        std::vector<double> cand(static_cast<std::size_t>(dim), 0.0);
        cand[0] = radius * 1.25 * i / 12.0;
        field.sup_candidates.push_back(std::move(cand));
    }
    return field;
}

SplitReport lq_split_norm(const ScalarField& f, double s, double threshold,
                          const QuadSpec& quad) {
    if (!(s > 0.0)) throw DomainError("lq_split_norm: s must be positive");
    if (!(threshold > 0.0)) throw DomainError("lq_split_norm: threshold must be positive");
    if (!f.radial)
        throw DomainError("lq_split_norm: needs a radial profile for the tail integral");
    if (f.dim != 3) throw DomainError("lq_split_norm: implemented for fields on R^3");
    SplitReport report;
    report.threshold = threshold;
    report.s = s;
    report.linf_bound = threshold;

    // Radial profile assumed monotone decreasing away from the origin:
    // {|f| > c} = {r < r_c}. Find r_c by bisection from a bracketing scan.
    auto profile = [&](double r) { return std::abs(f.radial(r)); };
    double hi = 1.0;
    while (profile(hi) > threshold && hi < 1e12) hi *= 2.0;
    if (hi >= 1e12) {
        report.finite = false;
        report.ls_norm = kInf;
        return report;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (profile(mid) > threshold)
            lo = mid;
        else
            hi = mid;
    }
    const double r_c = 0.5 * (lo + hi);
    if (r_c <= 0.0) {
        report.ls_norm = 0.0;
        return report;
    }

    // int_{r < r_c} |f|^s dx = 4 pi int_0^{r_c} profile(r)^s r^2 dr with
    // geometric panels toward the origin; non-decaying panel contributions
    // mean the norm diverges.
    double total = 0.0;
    double prev = kInf;
    bool converged = false;
    double contribution_ratio_acc = 0.0;
    int ratio_n = 0;
    for (int j = 0; j < quad.max_panels; ++j) {
        const double b = r_c * std::pow(0.5, j);
        const double a = 0.5 * b;
        const double cj = integrate_gl(
            [&](double r) { return std::pow(profile(r), s) * r * r; }, a, b, quad.gl_nodes);
        total += cj;
        if (std::isfinite(prev) && prev > 0.0 && cj > 0.0) {
            contribution_ratio_acc += cj / prev;
            ++ratio_n;
        }
        prev = cj;
        if (j >= 8 && cj <= 1e-9 * total) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const double rho = ratio_n > 0 ? contribution_ratio_acc / ratio_n : 1.0;
        if (rho >= 0.95) {
            report.finite = false;
            report.ls_norm = kInf;
            return report;
        }
        total += prev * rho / (1.0 - rho);
    }
    report.ls_norm = std::pow(4.0 * std::numbers::pi * total, 1.0 / s);
    return report;
}

double divergence_check(const FieldSpec& field, int n_points, double box, RngStream& rng) {
    if (!field.has_vector()) throw DomainError("divergence_check: field has no vector part");
    if (!field.div_a) throw DomainError("divergence_check: field declares no divergence");
    const int d = field.dim;
    const double h = 1e-5 * std::max(1.0, box);
    std::vector<double> p(static_cast<std::size_t>(d));
    std::vector<double> shifted(static_cast<std::size_t>(d));
    std::vector<double> a_plus(static_cast<std::size_t>(d));
    std::vector<double> a_minus(static_cast<std::size_t>(d));
    double worst = 0.0;
    for (int trial = 0; trial < n_points; ++trial) {
        for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = box * (2.0 * rng.u01() - 1.0);
        double fd = 0.0;
        for (int i = 0; i < d; ++i) {
            shifted = p;
            shifted[static_cast<std::size_t>(i)] += h;
            field.vector_potential(shifted, a_plus);
            shifted[static_cast<std::size_t>(i)] -= 2.0 * h;
            field.vector_potential(shifted, a_minus);
            fd += (a_plus[static_cast<std::size_t>(i)] - a_minus[static_cast<std::size_t>(i)]) /
                  (2.0 * h);
        }
        const double declared = field.div_a(p);
        const double scale = std::max(1.0, std::abs(declared));
        worst = std::max(worst, std::abs(fd - declared) / scale);
    }
    return worst;
}

} // namespace fkmc
