#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "fkmc/errors.hpp"
#include "fkmc/potentials.hpp"
#include "fkmc/semigroup.hpp"

using namespace fkmc;

namespace {

FieldSpec free_field(int dim) {
    FieldSpec f;
    f.dim = dim;
    f.name = "zero";
    return f;
}

Psi psi_one() {
    Psi p;
    p.eval = [](std::span<const double>) { return std::complex<double>{1.0, 0.0}; };
    p.is_real = true;
    return p;
}

Psi psi_gauss() {
    Psi p;
    p.eval = [](std::span<const double> z) {
        double r2 = 0.0;
        for (double c : z) r2 += c * c;
        return std::complex<double>{std::exp(-0.5 * r2), 0.0};
    };
    p.is_real = true;
    return p;
}

} // namespace

TEST_CASE("free evolution of the constant function is exact") {
    const FieldSpec f = free_field(2);
    SemigroupQuery q;
    q.grid = TimeGrid::make(1.0, 16);
    q.n_paths = 400;
    q.seed = 5;
    const Exec exec{1};
    auto est = evaluate(f, psi_one(), std::vector<double>{0.3, -0.7}, q, exec);
    CHECK(est.real() == 1.0);
    CHECK(est.mean.imag() == 0.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.n == 400);
    CHECK(est.clamp_count == 0);
}

TEST_CASE("a constant potential produces the exact exponential factor") {
    FieldSpec f = free_field(1);
    f.scalar_potential = [](std::span<const double>) { return 0.7; };
    SemigroupQuery q;
    q.grid = TimeGrid::make(0.5, 32);
    q.n_paths = 200;
    q.seed = 6;
    const Exec exec{1};
    auto est = evaluate(f, psi_one(), std::vector<double>{0.0}, q, exec);
    CHECK(est.real() == doctest::Approx(std::exp(-0.35)).epsilon(1e-14));
    CHECK(est.std_error < 1e-12);
}

TEST_CASE("heat evolution of a Gaussian at three points") {
    // For psi(z) = exp(-z^2/2) and A = V = 0,
    // E_x psi(B_t) = (1+t)^{-1/2} exp(-x^2 / (2 (1+t))); at t = 1 the values
    // below are 2^{-1/2}, 2^{-1/2} e^{-1/4}, 2^{-1/2} e^{-1}.
    const double expected[3] = {0.70710678118654752, 0.55069531490318375,
                                0.26013004751144445};
    const FieldSpec f = free_field(1);
    SemigroupQuery q;
    q.grid = TimeGrid::make(1.0, 100);
    q.n_paths = 20000;
    q.seed = 41;
    const Exec exec{1};
    for (int i = 0; i < 3; ++i) {
        const std::vector<double> x{static_cast<double>(i)};
        auto est = evaluate(f, psi_gauss(), x, q, exec);
        CHECK(std::abs(est.real() - expected[i]) < 3.5 * est.std_error);
        CHECK(std::abs(est.mean.imag()) < 1e-15);
    }
}

TEST_CASE("a NaN potential is reported, not averaged") {
    FieldSpec f = free_field(1);
    f.scalar_potential = [](std::span<const double>) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    SemigroupQuery q;
    q.grid = TimeGrid::make(0.1, 4);
    q.n_paths = 8;
    const Exec exec{1};
    CHECK_THROWS_AS((void)evaluate(f, psi_one(), std::vector<double>{0.0}, q, exec),
                    NumericError);
}

TEST_CASE("potential clamping is exact, counted, and flagged") {
    FieldSpec f = free_field(1);
    f.scalar_potential = [](std::span<const double>) { return -100.0; };
    f.clamp = 1.0;
    SemigroupQuery q;
    q.grid = TimeGrid::make(1.0, 8);
    q.n_paths = 256;
    q.seed = 8;
    const Exec exec{1};
    auto est = evaluate(f, psi_one(), std::vector<double>{0.0}, q, exec);
    CHECK(est.clamp_count == 256 * 8);
    CHECK(est.clamp_warning);
    CHECK(est.real() == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("fused pair kernel agrees with composing coupling and action") {
    const FieldSpec f = smooth_bump(2, 1.0, 2.0);
    const std::vector<double> x{0.6, 0.1};
    const std::vector<double> y{-0.4, -0.3};
    const MirrorGeometry geom = MirrorGeometry::make(x, y);
    const Psi psi = psi_gauss();
    const Exec exec{1};
    SemigroupQuery q;
    q.grid = TimeGrid::make(1.0, 256);
    q.n_paths = 1;
    q.seed = 77;
    for (std::uint64_t s = 0; s < 50; ++s) {
        q.stream_base = s;
        const auto fused = evaluate_pair_difference(f, psi, x, y, q, exec);
        CHECK(fused.difference.n == 1);

        RngStream rng(q.seed, s);
        const auto pair = mirror_couple(geom, q.grid, rng);
        const double tx = action_phase(f, pair.x_path).phase;
        const double ty = action_phase(f, pair.y_path).phase;
        const std::complex<double> wx{std::cos(tx), -std::sin(tx)};
        const std::complex<double> wy{std::cos(ty), -std::sin(ty)};
        const auto px = psi.eval(pair.x_path.point_span(q.grid.n_steps));
        const auto py = psi.eval(pair.y_path.point_span(q.grid.n_steps));
        const std::complex<double> composed = wx * px - wy * py;
        CHECK(std::abs(fused.difference.mean - composed) < 1e-12);

        // The frozen-modulus estimator matches 2 |sin((tx - ty)/2)| as well.
        const auto lhs = coupling_lhs(f, x, y, q, exec);
        CHECK(std::abs(lhs.real() - 2.0 * std::abs(std::sin(0.5 * (tx - ty)))) < 1e-12);
    }
}

TEST_CASE("pair difference vanishes identically without a field") {
    const FieldSpec f = free_field(2);
    SemigroupQuery q;
    q.grid = TimeGrid::make(0.5, 64);
    q.n_paths = 300;
    q.seed = 9;
    const Exec exec{1};
    auto est = evaluate_pair_difference(f, psi_one(), std::vector<double>{0.5, 0.0},
                                        std::vector<double>{-0.5, 0.0}, q, exec);
    CHECK(std::abs(est.difference.mean) == 0.0);
    CHECK(est.phase_term_mean == 0.0);
    CHECK(est.rough_term_mean == 0.0);
    CHECK(est.var_coupled == 0.0);
}

TEST_CASE("common random numbers beat independent drivers at small separation") {
    const FieldSpec f = smooth_bump(2, 1.0, 2.0);
    const Psi psi = psi_gauss();
    const std::vector<double> x{0.05, 0.0};
    const std::vector<double> y{-0.05, 0.0};
    SemigroupQuery q;
    q.grid = TimeGrid::make(1.0, 100);
    q.n_paths = 4000;
    q.seed = 10;
    const Exec exec{1};
    const auto coupled = evaluate_pair_difference(f, psi, x, y, q, exec);
    const auto indep = evaluate_pair_difference_independent(f, psi, x, y, q, exec);
    CHECK(coupled.var_coupled < 0.5 * indep.var_coupled);
}

TEST_CASE("pair kernels ignore the scalar part") {
    FieldSpec f = smooth_bump(2, 1.0, 2.0);
    SemigroupQuery q;
    q.grid = TimeGrid::make(0.5, 50);
    q.n_paths = 64;
    q.seed = 11;
    const Exec exec{1};
    const std::vector<double> x{0.4, 0.0};
    const std::vector<double> y{-0.4, 0.0};
    const auto plain = evaluate_pair_difference(f, psi_gauss(), x, y, q, exec);
    f.scalar_potential = [](std::span<const double>) { return 3.0; };
    const auto with_v = evaluate_pair_difference(f, psi_gauss(), x, y, q, exec);
    CHECK(plain.difference.mean == with_v.difference.mean);
}

TEST_CASE("ground state of the constant planar field") {
    const double b = 1.0;
    const FieldSpec f = constant_field_2d(b);
    Psi psi;
    psi.eval = [b](std::span<const double> z) {
        const double r2 = z[0] * z[0] + z[1] * z[1];
        return std::complex<double>{std::exp(-0.25 * b * r2), 0.0};
    };
    psi.is_real = true;

    // Finite-difference check of the eigenvalue relation
    //   (-(1/2) lap + i A . grad + (1/2)|A|^2) psi = (b/2) psi
    // at a few points, before trusting the Monte Carlo route.
    const double h = 1e-4;
    for (auto& pt : {std::vector<double>{0.7, -0.4}, std::vector<double>{0.0, 0.0},
                     std::vector<double>{1.2, 0.9}}) {
        auto val = [&](double dx, double dy) {
            return psi.eval(std::vector<double>{pt[0] + dx, pt[1] + dy}).real();
        };
        const double center = val(0.0, 0.0);
        const double lap = (val(h, 0.0) + val(-h, 0.0) + val(0.0, h) + val(0.0, -h) -
                            4.0 * center) / (h * h);
        const double gx = (val(h, 0.0) - val(-h, 0.0)) / (2.0 * h);
        const double gy = (val(0.0, h) - val(0.0, -h)) / (2.0 * h);
        std::vector<double> a(2);
        f.vector_potential(pt, a);
        const std::complex<double> hpsi =
            -0.5 * lap + std::complex<double>{0.0, 1.0} * (a[0] * gx + a[1] * gy) +
            0.5 * (a[0] * a[0] + a[1] * a[1]) * center;
        CHECK(std::abs(hpsi - 0.5 * b * center) < 1e-6);
    }

    SemigroupQuery q;
    q.grid = TimeGrid::make(0.25, 50);
    q.n_paths = 20000;
    q.seed = 12;
    const Exec exec{1};
    auto res = eigen_residual(f, psi, 0.5 * b, std::vector<double>{0.3, 0.2}, q, exec);
    CHECK(res.reference == doctest::Approx(std::exp(-0.125) * std::exp(-0.25 * 0.13))
                               .epsilon(1e-12));
    CHECK(res.rel_error < 0.03);
}
