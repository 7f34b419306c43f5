#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ordifun {

/// SplitMix64 finalizer. Bijective 64-bit mixer used both for key derivation
/// and as the output function of the counter generator below.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximation, accurate to ~1e-16 for p in (0,1)).
double inverse_normal_cdf(double p);

/// High 64 bits of a 64x64 product, in portable integer arithmetic.
constexpr std::uint64_t mul_high_u64(std::uint64_t a, std::uint64_t b) noexcept {
    const std::uint64_t a_lo = a & 0xffffffffULL, a_hi = a >> 32;
    const std::uint64_t b_lo = b & 0xffffffffULL, b_hi = b >> 32;
    const std::uint64_t low = a_lo * b_lo;
    const std::uint64_t mid1 = a_hi * b_lo + (low >> 32);
    const std::uint64_t mid2 = a_lo * b_hi + (mid1 & 0xffffffffULL);
    return a_hi * b_hi + (mid1 >> 32) + (mid2 >> 32);
}

/// Counter-based pseudo random stream.
///
/// A stream is identified by a 64-bit key derived from a seed and a path of
/// integers (chained mix64 hashing). Draw k is a pure function of (key, k),
/// so streams can be split arbitrarily: substreams never perturb each other
/// and adding new substreams never changes existing draws. Output is the
/// canonical SplitMix64 sequence for the derived key, identical on every
/// platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : key_(mix64(seed)) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
        : key_(mix64(seed)) {
        for (std::uint64_t p : path) key_ = mix64(key_ ^ mix64(p));
    }

    /// Derive an independent child stream; does not consume draws from this one.
    RngStream substream(std::uint64_t id) const {
        RngStream child(*this);
        child.key_ = mix64(key_ ^ mix64(id));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1), never exactly 0 or 1 (safe for inverse CDFs).
    double uniform01_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// N(mu, sigma) via inverse-CDF sampling; sigma = 0 is a point mass at mu.
    double normal(double mu, double sigma) {
        return mu + sigma * inverse_normal_cdf(uniform01_open());
    }

    /// Uniform integer in {0, ..., k-1} (k >= 1).
    std::uint64_t uniform_int(std::uint64_t k) { return mul_high_u64(next_u64(), k); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle of {0, ..., n-1} driven by the given stream.
std::vector<int> shuffled_indices(int n, RngStream rng);

}  // namespace ordifun
