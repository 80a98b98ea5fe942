#include "fkmc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fkmc/errors.hpp"
#include "fkmc/kahan.hpp"
#include "fkmc/rng.hpp"

namespace fkmc {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("fit_line: need at least two points");
    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    KahanSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (!(sxx.value() > 0.0)) throw DomainError("fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy.value() > 0.0
                 ? (sxy.value() * sxy.value()) / (sxx.value() * syy.value())
                 : 1.0;
    return fit;
}

HolderFit holder_fit(const std::vector<double>& distances, const std::vector<double>& diffs) {
    if (distances.size() != diffs.size()) throw DomainError("holder_fit: size mismatch");
    std::vector<double> lx;
    std::vector<double> ly;
    HolderFit fit;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] > 0.0))
            throw DomainError("holder_fit: distances must be positive");
        const double a = std::abs(diffs[i]);
        if (a == 0.0) {
            ++fit.excluded_zero;
            continue;
        }
        lx.push_back(std::log(distances[i]));
        ly.push_back(std::log(a));
    }
    std::set<double> scales(lx.begin(), lx.end());
    if (scales.size() < 4)
        throw DomainError("holder_fit: need at least 4 distinct scales with nonzero differences");
    const LineFit line = fit_line(lx, ly);
    fit.beta_hat = line.slope;
    fit.c_hat = std::exp(line.intercept);
    fit.r2 = line.r2;
    fit.ci_low = fit.beta_hat;
    fit.ci_high = fit.beta_hat;
    return fit;
}

BootstrapCI bootstrap_ci(std::int64_t n_blocks, std::uint64_t seed,
                         const std::function<double(const std::vector<std::int64_t>&)>& refit) {
    if (n_blocks < 2) throw DomainError("bootstrap_ci: need at least two blocks");
    constexpr int kResamples = 200;
    RngStream rng(seed, 0);
    std::vector<double> stats;
    stats.reserve(kResamples);
    std::vector<std::int64_t> picks(static_cast<std::size_t>(n_blocks));
    for (int r = 0; r < kResamples; ++r) {
        for (auto& p : picks)
            p = static_cast<std::int64_t>(rng.u01() * static_cast<double>(n_blocks));
        for (auto& p : picks) p = std::min(p, n_blocks - 1);
        stats.push_back(refit(picks));
    }
    std::sort(stats.begin(), stats.end());
    // 2.5% and 97.5% percentile endpoints
    const auto pick = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, stats.size() - 1);
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * stats[lo] + w * stats[hi];
    };
    return {pick(0.025), pick(0.975)};
}

} // namespace fkmc
