#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ecproc {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the Philox key. The 128-bit counter is split into a
/// 64-bit stream id (high half) and a 64-bit block index (low half), so
/// `CounterRng(seed, stream)` is an independent stream for every stream id.
/// Draws are a pure function of (seed, stream, draw index): work units that
/// own a stream id produce the same numbers on any thread count.
///
/// Stream conventions used in the toolkit:
///   - sample_cloud: stream = point index
///   - Monte Carlo term k of a limit function: stream = k (plus an offset per
///     estimator, see limits.cpp)
class CounterRng {
public:
    using result_type = std::uint64_t;
    static constexpr const char* algorithm_name = "philox4x32-10";

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in the open interval (0, 1), 53 random bits.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (the second variate is cached).
    double normal() noexcept;

    /// Exponential with the given rate.
    double exponential(double rate) noexcept;

    /// Single Philox4x32-10 block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive sub-seeds from (seed, tag) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace ecproc
