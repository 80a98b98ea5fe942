#include "fkmc/mc.hpp"

#include <cmath>

namespace fkmc {

McEstimate finish_estimate(const ComplexMoments& m, std::uint64_t seed,
                           std::uint64_t stream_base) {
    McEstimate est;
    est.n = m.n;
    est.clamp_count = m.clamps;
    est.seed = seed;
    est.stream_base = stream_base;
    if (m.n == 0) return est;
    const double n = static_cast<double>(m.n);
    const double mean_re = m.sum_re / n;
    const double mean_im = m.sum_im / n;
    est.mean = {mean_re, mean_im};
    if (m.n > 1) {
        const double var_re = std::max(0.0, (m.sumsq_re - n * mean_re * mean_re) / (n - 1.0));
        const double var_im = std::max(0.0, (m.sumsq_im - n * mean_im * mean_im) / (n - 1.0));
        est.std_error = std::sqrt((var_re + var_im) / n);
    }
    return est;
}

} // namespace fkmc
