// Log-log exponent fitting with bootstrap confidence intervals.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fkmc {

struct HolderFit {
    double beta_hat = 0.0;   // fitted exponent (log-log slope)
    double c_hat = 0.0;      // fitted prefactor
    double r2 = 0.0;
    double ci_low = 0.0;     // bootstrap CI on beta_hat, when requested
    double ci_high = 0.0;
    std::int64_t excluded_zero = 0; // pairs dropped because |df| == 0
};

// Least squares of log|df| against log(distance). Pairs with df == 0 are
// excluded and counted; fewer than 4 surviving distinct scales is an error.
HolderFit holder_fit(const std::vector<double>& distances, const std::vector<double>& diffs);

// Plain slope/intercept/r2 of y against x (no exclusion rules).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Percentile bootstrap over per-block statistics: `refit` receives a vector
// of resampled block indices and returns the statistic. 200 resamples.
struct BootstrapCI {
    double low = 0.0;
    double high = 0.0;
};

BootstrapCI bootstrap_ci(std::int64_t n_blocks, std::uint64_t seed,
                         const std::function<double(const std::vector<std::int64_t>&)>& refit);

} // namespace fkmc
