#include "stealth/rng.hpp"

namespace stealth {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kTrialMul = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kStreamMul = 0xAEF17502108EF2D9ULL;

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
    : key_(mix64(mix64(mix64(seed) ^ (trial * kTrialMul)) ^ (stream * kStreamMul))) {}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double a, double b) { return a + (b - a) * uniform(); }

std::uint64_t CounterRng::below(std::uint64_t n) {
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

}  // namespace stealth
