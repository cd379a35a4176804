#pragma once

// Counter-based random streams. Every consumer derives its own stream key
// from (seed, index, tag), so draw order is independent across components
// and adding streams never perturbs existing ones.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace clumem {

// splitmix64 finalizer. Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// FNV-1a over the tag bytes.
inline constexpr std::uint64_t tag64(std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

// Documented key-derivation chain: three finalizer rounds folding in the
// seed, a numeric index and a stage tag. Stable across platforms; part of
// the reproducibility contract.
inline constexpr std::uint64_t hash64(std::uint64_t seed, std::uint64_t index,
                                      std::string_view tag) {
    std::uint64_t h = mix64(seed ^ 0x9E3779B97F4A7C15ull);
    h = mix64(h ^ index);
    h = mix64(h ^ tag64(tag));
    return h;
}

// splitmix64 sequence starting at a derived key. The spare-value cache makes
// gaussian() consume exactly two words per pair of variates.
class Stream {
  public:
    explicit Stream(std::uint64_t key) : state_(key) {}
    Stream(std::uint64_t seed, std::uint64_t index, std::string_view tag)
        : state_(hash64(seed, index, tag)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; u1 is shifted into (0, 1] so the log
    // never sees zero
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 =
            (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double stddev) {
        return mean + stddev * gaussian();
    }

    void gaussian_fill(double* out, std::size_t n, double mean, double stddev) {
        for (std::size_t i = 0; i < n; ++i) out[i] = gaussian(mean, stddev);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace clumem
