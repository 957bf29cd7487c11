#pragma once

// Counter-based splittable RNG. Every consumer derives its own independent
// sub-stream from (seed, purpose tags), so results are reproducible regardless
// of evaluation order or threading.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace kikuchi {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    // Derive an independent stream keyed by an integer tag.
    Rng derive(uint64_t tag) const { return Rng(splitmix64(state_ ^ splitmix64(tag + 0x9e3779b97f4a7c15ULL))); }
    Rng derive(std::string_view purpose, uint64_t tag = 0) const {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : purpose) h = (h ^ static_cast<uint8_t>(c)) * 0x100000001b3ULL;
        return derive(splitmix64(h) ^ tag);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); bound > 0.
    uint64_t next_below(uint64_t bound) {
        // Lemire's multiply-shift with rejection.
        uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < bound) {
            uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // ±1 with equal probability.
    int next_sign() { return (next_u64() & 1) ? 1 : -1; }

    double next_gaussian() {
        // Marsaglia polar method; cache the second deviate.
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

    // Poisson deviate; inversion for small lambda, PTRD-style normal-rejection
    // fallback via decomposition for large lambda.
    uint64_t next_poisson(double lambda) {
        uint64_t total = 0;
        // Split large lambda into chunks where inversion stays stable.
        while (lambda > 30.0) {
            // Atkinson-style: draw Poi(lambda) = Poi(floor(l/2)) + Poi(rest)
            // via gamma-free normal approximation is biased; instead use the
            // exact "thin by exponential waiting times in chunks" approach:
            // Poi(a + b) = Poi(a) + Poi(b).
            double chunk = 30.0;
            total += poisson_inversion(chunk);
            lambda -= chunk;
        }
        return total + poisson_inversion(lambda);
    }

private:
    uint64_t poisson_inversion(double lambda) {
        if (lambda <= 0.0) return 0;
        double L = std::exp(-lambda), p = 1.0;
        uint64_t n = 0;
        do {
            ++n;
            p *= next_double();
        } while (p > L);
        return n - 1;
    }

    uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace kikuchi
