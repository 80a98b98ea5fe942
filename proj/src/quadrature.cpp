#include "fkmc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fkmc/errors.hpp"

namespace fkmc {

namespace {

// Legendre P_n and derivative by recurrence; nodes by Newton from the
// Chebyshev-like initial guess. Standard construction, stable for n <= ~200.
QuadRule build_gauss_legendre(int n) {
    if (n < 1 || n > 256) throw DomainError("gauss_legendre: order out of range");
    QuadRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] =
            2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

// Hermite (physicists', weight e^{-x^2}) nodes by Newton on the recurrence
// for orthonormal Hermite functions; initial guesses march in from the
// largest root.
QuadRule build_gauss_hermite(int n) {
    // The Newton solve below can hop a root past order ~200 (the rule comes
    // back unsorted), so orders beyond 192 are refused rather than returned.
    if (n < 1 || n > 192) throw DomainError("gauss_hermite: order out of range");
    QuadRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double pi_qtr = std::pow(std::numbers::pi, -0.25);
    double x = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * rule.nodes[static_cast<std::size_t>(n - 1)];
        else if (i == 3)
            x = 1.91 * x - 0.91 * rule.nodes[static_cast<std::size_t>(n - 2)];
        else
            x = 2.0 * x - rule.nodes[static_cast<std::size_t>(n - i + 1)];
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = pi_qtr, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = x * std::sqrt(2.0 / (k + 1.0)) * p1 -
                     std::sqrt(static_cast<double>(k) / (k + 1.0)) * p2;
            }
            dp = std::sqrt(2.0 * n) * p1;
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-14) break;
        }
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        const double w = 2.0 / (dp * dp);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
        rule.weights[static_cast<std::size_t>(i)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

template <class Builder>
const QuadRule& cached_rule(std::map<int, QuadRule>& cache, std::mutex& mu, int n,
                            Builder&& build) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

} // namespace

const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached_rule(cache, mu, n, build_gauss_legendre);
}

const QuadRule& gauss_hermite(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached_rule(cache, mu, n, build_gauss_hermite);
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const QuadRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

} // namespace fkmc
