#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace collabscope {

// SplitMix64 finalizer. Used to derive well-separated seeds from a master
// seed, so that independent substreams never share correlated state.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed for a named substream of a master seed. Streams with different names
// or indices are independent; the same (master, name, k) always yields the
// same seed, regardless of how many other streams exist or in which order
// they are drawn from. This is what makes parallel execution deterministic.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                       std::uint64_t k = 0) {
    return mix64(mix64(master ^ fnv1a64(name)) + k);
}

// Self-contained generator on top of mt19937_64. The samplers are hand-rolled
// rather than taken from <random> distributions because the standard leaves
// their sequences implementation-defined and we promise reproducible output
// for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::uniform_index: n must be positive");
        const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
        if (rem == n - 1) return next_u64() % n;  // n divides 2^64
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
        std::uint64_t r = next_u64();
        while (r >= limit) r = next_u64();
        return r % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double exponential() { return -std::log1p(-uniform01()); }

    // Gamma(alpha, 1) via Marsaglia-Tsang, boosted for alpha < 1.
    double gamma(double alpha) {
        if (alpha <= 0.0) throw std::invalid_argument("Rng::gamma: alpha must be positive");
        if (alpha < 1.0) {
            const double u = uniform01();
            return gamma(alpha + 1.0) * std::pow(u > 0 ? u : 0x1.0p-53, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Draws k distinct indices from [0, n) uniformly at random, using a partial
// Fisher-Yates pass over a caller-provided permutation buffer. The buffer
// is left permuted; conditioned on the fresh random swap positions, every
// k-subset remains exactly uniform no matter the buffer's starting order,
// so the same buffer can be reused across draws without resetting.
inline void sample_distinct(Rng& rng, std::vector<std::uint32_t>& perm, std::size_t k,
                            std::vector<std::uint32_t>& out) {
    const std::size_t n = perm.size();
    if (k > n) throw std::invalid_argument("sample_distinct: k exceeds population size");
    out.resize(k);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = t + static_cast<std::size_t>(rng.uniform_index(n - t));
        std::swap(perm[t], perm[j]);
        out[t] = perm[t];
    }
}

}  // namespace collabscope
