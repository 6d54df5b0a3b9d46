#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace varsel {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines a seed with a value into a new, well-mixed seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value) noexcept;

/// Combines a seed with a stream label (FNV-1a of the label).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

/// Random stream with distribution code that is bit-stable across standard
/// libraries. std::mt19937_64 is fully specified; the std distributions are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal (Box-Muller, both values used).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace varsel
