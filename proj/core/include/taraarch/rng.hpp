#pragma once

// Counter-based random numbers: draw i of a stream depends only on (seed, i), so a
// replicate produces the same numbers no matter which thread runs it or in what order.

#include <cstdint>

namespace taraarch {

/// splitmix64 finalizer; a bijective 64-bit avalanche mix.
[[nodiscard]] constexpr std::uint64_t avalanche(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Seed for replicate r at sample size n:
///   avalanche(avalanche(avalanche(base) ^ n) + golden * (r + 1)).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n,
                                                  std::uint64_t r) noexcept {
    constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
    return avalanche(avalanche(avalanche(base) ^ n) + golden * (r + 1));
}

class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(avalanche(seed)) {}

    [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
        return avalanche(key_ + 0x9e3779b97f4a7c15ULL * (index + 1));
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    [[nodiscard]] constexpr double uniform(std::uint64_t index) const noexcept {
        return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by inversion of uniform(index).
    [[nodiscard]] double normal(std::uint64_t index) const;

private:
    std::uint64_t key_;
};

/// Sequential view over a CounterRng.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed, std::uint64_t start = 0) noexcept : rng_(seed), next_(start) {}

    double operator()() { return rng_.normal(next_++); }
    [[nodiscard]] std::uint64_t position() const noexcept { return next_; }

private:
    CounterRng rng_;
    std::uint64_t next_;
};

[[nodiscard]] double normal_cdf(double x);
[[nodiscard]] double normal_quantile(double u);

}  // namespace taraarch
