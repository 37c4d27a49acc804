#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "aic/common.hpp"

namespace aic {

// Counter-based random streams. Every simulation entity owns a stream keyed
// by (seed, salt, entity id); a draw is a pure function of (key, counter), so
// the schedule in which entities are processed can never change their draws.
// The core is the splitmix64 output function, evaluated at key + n*gamma.

inline constexpr u64 kSmGamma = 0x9E3779B97F4A7C15ull;

inline u64 splitmix64(u64 x) {
    x += kSmGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline u64 mix_key(u64 seed, u64 salt, u64 id) {
    return splitmix64(splitmix64(seed ^ splitmix64(salt)) ^ id);
}

// Stream salts, one per entity family.
namespace salts {
inline constexpr u64 agent = 0xA6E17ull;
inline constexpr u64 poi = 0x90157ull;
inline constexpr u64 group = 0x6707ull;
inline constexpr u64 global = 0x61081ull;
inline constexpr u64 synth = 0x575ull;
inline constexpr u64 tessellation = 0x7E55ull;
inline constexpr u64 replication = 0x4E9ull;
}  // namespace salts

class RngStream {
public:
    RngStream() = default;
    explicit RngStream(u64 key) : key_(key) {}
    RngStream(u64 seed, u64 salt, u64 id) : key_(mix_key(seed, salt, id)) {}

    u64 next_u64() { return splitmix64(key_ + kSmGamma * counter_++); }

    // Uniform double in [0, 1) with 53 significant bits.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Fixed-point multiply keeps the mapping
    // platform-independent; bias is O(2^-64).
    u64 below(u64 n) {
        if (n <= 1) return 0;
        return u64((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    i64 uniform_int(i64 lo, i64 hi) {  // inclusive bounds
        return lo + i64(below(u64(hi - lo + 1)));
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

    // Index draw from non-negative weights; total must be > 0.
    std::size_t weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double x = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    double normal(double mean = 0.0, double sd = 1.0) {
        // Box-Muller; one value per call keeps the draw count predictable.
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    // Knuth's method; adequate for the small rates used here.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double limit = std::exp(-lambda);
        double prod = 1.0;
        int n = 0;
        do {
            prod *= uniform01();
            ++n;
        } while (prod > limit && n < 10000);
        return n - 1;
    }

    // Geometric count of failures before first success, truncated.
    int geometric(double p, int cap) {
        if (p >= 1.0) return 0;
        double u = uniform01();
        int k = int(std::floor(std::log1p(-u) / std::log1p(-p)));
        return k > cap ? cap : k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    u64 counter() const { return counter_; }

private:
    u64 key_ = 0;
    u64 counter_ = 0;
};

}  // namespace aic
