#include "doctest.h"

#include <cmath>
#include <vector>

#include "fkmc/errors.hpp"
#include "fkmc/fit.hpp"

using namespace fkmc;

TEST_CASE("line fit recovers an exact line") {
    const std::vector<double> x{-2.0, -1.0, 0.5, 3.0};
    std::vector<double> y;
    for (double v : x) y.push_back(1.75 * v - 0.4);
    const auto fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line fit rejects degenerate abscissae") {
    CHECK_THROWS_AS((void)fit_line({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), DomainError);
    CHECK_THROWS_AS((void)fit_line({1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS((void)fit_line({1.0, 2.0}, {0.0}), DomainError);
}

TEST_CASE("exponent fit on a pure power law") {
    std::vector<double> d, df;
    for (double dist : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
        d.push_back(dist);
        df.push_back(3.0 * std::sqrt(dist));
    }
    const auto fit = holder_fit(d, df);
    CHECK(fit.beta_hat == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.c_hat == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.excluded_zero == 0);
    // Without a bootstrap request the CI collapses onto the point estimate.
    CHECK(fit.ci_low == doctest::Approx(fit.beta_hat).epsilon(1e-12));
    CHECK(fit.ci_high == doctest::Approx(fit.beta_hat).epsilon(1e-12));
}

TEST_CASE("zero differences are excluded and counted") {
    const std::vector<double> d{0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
    std::vector<double> df;
    for (double dist : d) df.push_back(2.0 * dist);
    df[2] = 0.0;
    const auto fit = holder_fit(d, df);
    CHECK(fit.excluded_zero == 1);
    CHECK(fit.beta_hat == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("too few surviving scales is an error") {
    CHECK_THROWS_AS((void)holder_fit({0.1, 0.2, 0.4}, {1.0, 1.0, 1.0}), DomainError);
    // Repeated distances do not count as new scales.
    CHECK_THROWS_AS((void)holder_fit({0.1, 0.1, 0.2, 0.4}, {1.0, 1.0, 1.0, 1.0}),
                    DomainError);
    // Exclusions can push a valid input under the limit.
    CHECK_THROWS_AS((void)holder_fit({0.1, 0.2, 0.4, 0.8}, {1.0, 1.0, 1.0, 0.0}),
                    DomainError);
}

TEST_CASE("bootstrap percentiles bracket the full-sample statistic") {
    // Statistic: mean of a fixed per-block table under resampling.
    const std::vector<double> table{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    auto refit = [&](const std::vector<std::int64_t>& idx) {
        double s = 0.0;
        for (auto i : idx) s += table[static_cast<std::size_t>(i)];
        return s / static_cast<double>(idx.size());
    };
    const auto ci = bootstrap_ci(static_cast<std::int64_t>(table.size()), 123, refit);
    CHECK(ci.low <= ci.high);
    CHECK(ci.low >= 1.0);
    CHECK(ci.high <= 8.0);
    const double full_mean = 4.5;
    CHECK(ci.low < full_mean);
    CHECK(ci.high > full_mean);
    // Same seed, same interval.
    const auto again = bootstrap_ci(static_cast<std::int64_t>(table.size()), 123, refit);
    CHECK(again.low == ci.low);
    CHECK(again.high == ci.high);
}
