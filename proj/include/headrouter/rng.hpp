#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "headrouter/errors.hpp"

// Seeded randomness helpers. Everything here is built on std::mt19937_64,
// whose output sequence is pinned by the standard, plus fully spelled-out
// transforms (rejection sampling, Box-Muller, Marsaglia-Tsang). The same seed
// therefore produces the same draws on every platform, up to libm rounding in
// the transcendental transforms.
namespace headrouter::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound) via rejection of the tail range.
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound == 0) throw Error(ErrorKind::config, "rng bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % bound;
    }

    // Uniform in (0, 1]: 53 mantissa bits, never exactly zero.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller, two uniforms per draw, no cached second value.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Marsaglia-Tsang for alpha >= 1, boosted by u^(1/alpha) below 1.
    double gamma(double alpha) {
        if (!(alpha > 0.0)) throw Error(ErrorKind::config, "gamma shape must be positive");
        if (alpha < 1.0) {
            const double u = uniform01();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
                return d * v;
            }
        }
    }

    // Symmetric Dirichlet draw of length n.
    std::vector<double> dirichlet(double concentration, std::size_t n) {
        std::vector<double> out(n);
        double sum = 0.0;
        for (auto& v : out) {
            v = gamma(concentration);
            sum += v;
        }
        if (sum <= 0.0) {
            // All gammas underflowed; fall back to a one-hot at a random slot.
            std::fill(out.begin(), out.end(), 0.0);
            out[bounded(n)] = 1.0;
            return out;
        }
        for (auto& v : out) v /= sum;
        return out;
    }

    // Partial Fisher-Yates: k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw Error(ErrorKind::config, "cannot sample more indices than exist");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

// Per-sample seed for stochastic methods: mixes the run seed with a hash of
// the sample id so distinct samples draw independent streams while a fixed
// (run seed, sample id) pair stays reproducible.
inline std::uint64_t derive_sample_seed(std::uint64_t run_seed, std::string_view sample_id) {
    std::uint64_t state = run_seed ^ fnv1a64(sample_id);
    return splitmix64(state);
}

}  // namespace headrouter::rng
