#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace mimoarq {

/// Counter-based random source.
///
/// Every Monte Carlo trial owns a generator keyed by (seed, stream, index),
/// so trial i of seed s produces the same draws regardless of the order in
/// which trials are evaluated or how they are split across threads. The
/// output function is SplitMix64 over a Weyl sequence started at a hash of
/// the key.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
        : state_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ (stream * 0x9e3779b97f4a7c15ULL)) ^
                 mix(index + 0xbb67ae8584caa73bULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(*this); }

    /// Circularly symmetric complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        constexpr double kHalfSqrt = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {kHalfSqrt * re, kHalfSqrt * im};
    }

    std::uint64_t bits(int count) { return (*this)() >> (64 - count); }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream identifiers. Distinct analyses draw from distinct streams so that
/// sharing a seed never correlates unrelated quantities.
namespace streams {
inline constexpr std::uint64_t kChannel = 1;
inline constexpr std::uint64_t kLinkTrial = 2;
inline constexpr std::uint64_t kOrthant = 3;
inline constexpr std::uint64_t kUnionBoundChannel = 4;
inline constexpr std::uint64_t kAudit = 5;
}  // namespace streams

inline constexpr std::uint64_t kDefaultSeed = 20081026;

}  // namespace mimoarq
