// Monte Carlo plumbing: estimates, the executor, and deterministic
// block-wise accumulation.
//
// Work is split into fixed-size blocks of consecutive item indices. Each
// block's partial result depends only on (seed, item indices), never on the
// worker that ran it, and partials are combined by a fixed-shape pairwise
// tree, so results are bit-identical for any worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fkmc {

inline constexpr std::int64_t kMcBlockSize = 1024;

struct McEstimate {
    std::complex<double> mean{0.0, 0.0};
    double std_error = 0.0; // sqrt((var_re + var_im) / n)
    std::int64_t n = 0;
    std::int64_t clamp_count = 0;
    std::uint64_t seed = 0;        // provenance
    std::uint64_t stream_base = 0; // first stream index used
    bool clamp_warning = false;

    double real() const { return mean.real(); }
};

// Execution policy: how many workers a parallel region may use.
// workers == 0 means hardware concurrency.
struct Exec {
    int workers = 1;

    int resolved_workers() const {
        if (workers > 0) return workers;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

inline std::int64_t block_count(std::int64_t n_items, std::int64_t block_size = kMcBlockSize) {
    return (n_items + block_size - 1) / block_size;
}

// Runs fn(block_index, begin, end) -> Partial over all blocks, returning the
// per-block partials in block order. Blocks are claimed atomically but stored
// by index, so the result is independent of scheduling.
template <class Partial, class Fn>
std::vector<Partial> run_blocks(const Exec& exec, std::int64_t n_items, Fn&& fn,
                                std::int64_t block_size = kMcBlockSize) {
    const std::int64_t n_blocks = block_count(n_items, block_size);
    std::vector<Partial> partials(static_cast<std::size_t>(n_blocks));
    const int workers = exec.resolved_workers();
    if (workers <= 1 || n_blocks <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            const std::int64_t begin = b * block_size;
            const std::int64_t end = std::min(begin + block_size, n_items);
            partials[static_cast<std::size_t>(b)] = fn(b, begin, end);
        }
        return partials;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto work = [&] {
        try {
            for (;;) {
                const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
                if (b >= n_blocks) return;
                const std::int64_t begin = b * block_size;
                const std::int64_t end = std::min(begin + block_size, n_items);
                partials[static_cast<std::size_t>(b)] = fn(b, begin, end);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            next.store(n_blocks, std::memory_order_relaxed); // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return partials;
}

// Pairwise reduction with a shape fixed by the block count alone.
template <class Partial>
Partial tree_reduce(std::vector<Partial> v) {
    if (v.empty()) return Partial{};
    while (v.size() > 1) {
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) v[out++] = v[i] + v[i + 1];
        if (v.size() % 2 == 1) v[out++] = v.back();
        v.resize(out);
    }
    return v.front();
}

// Accumulator for complex-valued per-item scores.
struct ComplexMoments {
    double sum_re = 0.0;
    double sum_im = 0.0;
    double sumsq_re = 0.0;
    double sumsq_im = 0.0;
    std::int64_t n = 0;
    std::int64_t clamps = 0;

    void add(double re, double im) {
        sum_re += re;
        sum_im += im;
        sumsq_re += re * re;
        sumsq_im += im * im;
        ++n;
    }

    ComplexMoments operator+(const ComplexMoments& o) const {
        return {sum_re + o.sum_re, sum_im + o.sum_im, sumsq_re + o.sumsq_re,
                sumsq_im + o.sumsq_im, n + o.n, clamps + o.clamps};
    }
};

McEstimate finish_estimate(const ComplexMoments& m, std::uint64_t seed, std::uint64_t stream_base);

} // namespace fkmc
