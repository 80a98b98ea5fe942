#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "fkmc/kato.hpp"
#include "fkmc/potentials.hpp"

using namespace fkmc;

namespace {

ScalarField coulomb_magnitude() {
    ParticleConfig cfg;
    cfg.n_electrons = 1;
    cfg.nuclei = {{0.0, 0.0, 0.0}};
    cfg.charges = {1.0};
    return coulomb_potential(cfg).potential_magnitude();
}

ScalarField constant_scalar(double c, int dim) {
    ScalarField f;
    f.dim = dim;
    f.name = "constant";
    f.eval = [c](std::span<const double>) { return c; };
    return f;
}

// Composite Simpson on [a, b] with n panels (n even).
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("Gaussian expectation of the Coulomb magnitude has a closed form") {
    // E_z 1/|B_s| = erf(|z| / sqrt(2 s)) / |z| in three dimensions.
    const ScalarField f = coulomb_magnitude();
    const QuadSpec quad;
    for (double s : {0.1, 0.5, 2.0}) {
        for (double r : {0.5, 1.0, 3.0}) {
            const std::vector<double> z{r, 0.0, 0.0};
            const double exact = std::erf(r / std::sqrt(2.0 * s)) / r;
            CHECK(gaussian_expectation(f, z, s, quad) ==
                  doctest::Approx(exact).epsilon(1e-6));
        }
    }
    // At the singular point the expectation is sqrt(2 / (pi s)).
    const std::vector<double> origin{0.0, 0.0, 0.0};
    for (double s : {0.25, 1.0}) {
        const double exact = std::sqrt(2.0 / (std::numbers::pi * s));
        CHECK(gaussian_expectation(f, origin, s, quad) ==
              doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("Gauss-Hermite route reproduces polynomial moments") {
    // E_z |B_s|^2 = |z|^2 + 2 s in two dimensions.
    ScalarField sq;
    sq.dim = 2;
    sq.name = "square";
    sq.eval = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    const QuadSpec quad;
    const std::vector<double> z{0.6, -0.8};
    for (double s : {0.1, 1.0, 3.0}) {
        CHECK(gaussian_expectation(sq, z, s, quad) ==
              doctest::Approx(1.0 + 2.0 * s).epsilon(1e-8));
    }
}

TEST_CASE("time functional of the Coulomb magnitude") {
    // K_alpha(1/|x|, t) is maximized at the origin where it equals
    // sqrt(2/pi) * 2 / (1 - alpha) * t^{(1-alpha)/2}.
    const ScalarField f = coulomb_magnitude();
    KatoQuery query;
    query.t = 1.0;
    query.candidates = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}};

    query.alpha = 0.0;
    auto k0 = kato_functional(f, query);
    CHECK(k0.finite);
    CHECK(k0.value == doctest::Approx(1.5957691216057307).epsilon(0.01));
    REQUIRE(k0.maximizer.size() == 3);
    CHECK(std::abs(k0.maximizer[0]) < 1e-12);
    CHECK(std::abs(k0.maximizer[1]) < 1e-12);

    query.alpha = 0.5;
    auto khalf = kato_functional(f, query);
    CHECK(khalf.finite);
    CHECK(khalf.value == doctest::Approx(3.1915382432114614).epsilon(0.01));

    // Scaling in t: value grows like t^{(1-alpha)/2}.
    query.alpha = 0.0;
    query.t = 4.0;
    auto k4 = kato_functional(f, query);
    CHECK(k4.value / k0.value == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("constant integrands integrate in closed form") {
    // K_alpha(c, t) = c * t^{1 - alpha/2} / (1 - alpha/2).
    const ScalarField f = constant_scalar(2.0, 3);
    KatoQuery query;
    query.candidates = {{0.0, 0.0, 0.0}};
    for (double alpha : {0.0, 0.5, 0.9}) {
        for (double t : {0.25, 1.0}) {
            query.alpha = alpha;
            query.t = t;
            const double exact = 2.0 * std::pow(t, 1.0 - alpha / 2.0) / (1.0 - alpha / 2.0);
            auto k = kato_functional(f, query);
            CHECK(k.finite);
            CHECK(k.value == doctest::Approx(exact).epsilon(1e-5));
        }
    }
}

TEST_CASE("a non-integrable singularity is reported as divergent") {
    // f = 1/|x|^2 gives E_0 f(B_s) = 1/s, whose time integral diverges.
    ScalarField f;
    f.dim = 3;
    f.name = "inverse-square";
    f.eval = [](std::span<const double> x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return 1.0 / r2;
    };
    f.radial = [](double r) { return 1.0 / (r * r); };
    f.singular_origin = true;
    KatoQuery query;
    query.alpha = 0.0;
    query.t = 1.0;
    query.candidates = {{0.0, 0.0, 0.0}};
    auto k = kato_functional(f, query);
    CHECK_FALSE(k.finite);
}

TEST_CASE("membership probe recovers the decay exponent") {
    const ScalarField f = coulomb_magnitude();
    const QuadSpec quad;
    const std::vector<std::vector<double>> candidates{{0.0, 0.0, 0.0}};
    const std::vector<double> ladder{1.0, 0.5, 0.25, 0.125, 0.0625};
    auto probe = kato_membership_probe(f, 0.0, ladder, candidates, quad);
    CHECK(probe.passes);
    REQUIRE(probe.values.size() == ladder.size());
    for (std::size_t i = 1; i < probe.values.size(); ++i)
        CHECK(probe.values[i] < probe.values[i - 1]);
    CHECK(probe.decay_exponent == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("field constant for the bump field matches a brute-force integral") {
    const FieldSpec field = smooth_bump(2, 1.0, 2.0);
    const double t = 1.0;
    const double q = 2.0;
    const QuadSpec quad;
    auto mc = magnetic_constant(field, t, q, std::nullopt, quad);
    CHECK(mc.div_term == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

    // Brute force: |A|^{2q} vanishes outside |x| < 2, so E_z is a plain
    // Gaussian integral over the disc, done with tensor Simpson.
    std::vector<double> a(2);
    auto abs_a = [&](double x0, double x1) {
        const double p[2]{x0, x1};
        field.vector_potential(std::span<const double>(p, 2), a);
        return std::hypot(a[0], a[1]);
    };
    auto ez = [&](const std::vector<double>& z, double s) {
        const int n = 160;
        const double lo = -2.0, hi = 2.0, h = (hi - lo) / n;
        double total = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double wi = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            for (int j = 0; j <= n; ++j) {
                const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
                const double x0 = lo + i * h, x1 = lo + j * h;
                const double g = std::pow(abs_a(x0, x1), 2.0 * q);
                if (g == 0.0) continue;
                const double dx0 = x0 - z[0], dx1 = x1 - z[1];
                total += wi * wj * g * std::exp(-(dx0 * dx0 + dx1 * dx1) / (2.0 * s));
            }
        }
        return total * h * h / 9.0 / (2.0 * std::numbers::pi * s);
    };
    double best = 0.0;
    for (const auto& z : field.sup_candidates) {
        const double val = simpson([&](double s) { return s <= 0.0 ? 0.0 : ez(z, s); },
                                   0.0, t, 64);
        best = std::max(best, val);
    }
    CHECK(mc.a_term == doctest::Approx(std::pow(best, 1.0 / q)).epsilon(0.02));
}

TEST_CASE("exponential moment of the squared coordinate") {
    // E exp(-int_0^t B_s^2 ds) = cosh(sqrt(2) t)^{-1/2}; left-point sums
    // carry an O(dt) bias, absorbed in the tolerance below.
    const double t = 0.5;
    const double exact = 1.0 / std::sqrt(std::cosh(std::sqrt(2.0) * t));
    CHECK(exact == doctest::Approx(0.89066165391038752).epsilon(1e-14));

    // Same number from the eigenvalue product of the Brownian covariance:
    // exp(-int B^2) factorizes over the Karhunen-Loeve modes with variances
    // 4 t^2 / (pi^2 (2k-1)^2); the truncated tail contributes
    // ~ sum_{k>N} mu_k, corrected for below.
    double log_prod = 0.0;
    const int n_modes = 200000;
    double tail = 0.0;
    for (int k = 1; k <= n_modes; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double mu = 4.0 * t * t / (std::numbers::pi * std::numbers::pi * odd * odd);
        log_prod += std::log1p(2.0 * mu);
    }
    tail = 2.0 * 4.0 * t * t / (std::numbers::pi * std::numbers::pi * 4.0 * n_modes);
    const double product = std::exp(-0.5 * (log_prod + tail));
    CHECK(product == doctest::Approx(exact).epsilon(1e-9));

    ScalarFn w = [](std::span<const double> z) { return -z[0] * z[0]; };
    const TimeGrid grid = TimeGrid::make(t, 500);
    const std::vector<double> z0{0.0};
    const Exec exec{1};
    auto est = exp_moment(w, 1, z0, grid, 20000, 50.0, 31, 0, exec);
    CHECK(est.clamp_count == 0);
    const double tol = std::max(4.0 * est.std_error, 0.004);
    CHECK(std::abs(est.real() - exact) < tol);
}

TEST_CASE("exponent clamping is applied and counted") {
    ScalarFn w = [](std::span<const double>) { return 10.0; };
    const TimeGrid grid = TimeGrid::make(1.0, 8);
    const std::vector<double> z0{0.0};
    const Exec exec{1};
    auto est = exp_moment(w, 1, z0, grid, 512, 2.0, 7, 0, exec);
    CHECK(est.clamp_count == 512);
    CHECK(est.real() == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}
