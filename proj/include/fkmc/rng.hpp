// Counter-based random number streams (Philox4x32-10).
//
// Each (seed, stream) pair addresses a statistically independent sequence
// that is reproducible bit-for-bit and cheap to construct, so Monte Carlo
// kernels can key one stream per path index and run in any order across
// workers without changing results.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fkmc {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}

} // namespace detail

// One addressable random stream. Stateless apart from the block counter and
// small caches, so copies are cheap and a stream is always reconstructible
// from (seed, stream_index).
class RngStream {
public:
    RngStream(std::uint64_t global_seed, std::uint64_t stream_index)
        : seed_(global_seed), stream_(stream_index) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

    std::uint64_t raw64() {
        if (!have_u64_) {
            const auto out = detail::philox4x32_10(
                {static_cast<std::uint32_t>(block_),
                 static_cast<std::uint32_t>(block_ >> 32),
                 static_cast<std::uint32_t>(stream_),
                 static_cast<std::uint32_t>(stream_ >> 32)},
                {static_cast<std::uint32_t>(seed_),
                 static_cast<std::uint32_t>(seed_ >> 32)});
            ++block_;
            pending_u64_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
            have_u64_ = true;
            return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        }
        have_u64_ = false;
        return pending_u64_;
    }

    // Uniform on (0, 1); never returns an exact endpoint.
    double u01() {
        return (static_cast<double>(raw64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; generated in pairs, one cached.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return pending_normal_;
        }
        const double u1 = u01();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        pending_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t pending_u64_ = 0;
    double pending_normal_ = 0.0;
    bool have_u64_ = false;
    bool have_normal_ = false;
};

} // namespace fkmc
