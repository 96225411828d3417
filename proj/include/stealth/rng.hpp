#pragma once

#include <cstdint>

namespace stealth {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based generator: output i of the stream with key K is
/// mix64(K + (i + 1)·0x9E3779B97F4A7C15). The key of stream `stream` for
/// trial `trial` under `seed` is
///   mix64(mix64(mix64(seed) ^ trial) ^ stream)
/// (with the two xored words pre-multiplied by distinct odd constants), so
/// every trial's draws depend only on (seed, trial, stream) and trials can
/// run in any order or in parallel.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on [a, b).
    double uniform(double a, double b);
    /// Uniform integer on [0, n), unbiased. n must be positive.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream ids used by the experiment harness.
inline constexpr std::uint64_t kBoundsStream = 0;
inline constexpr std::uint64_t kSubsetStream = 1;

}  // namespace stealth
