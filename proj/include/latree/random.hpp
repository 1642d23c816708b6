#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace latree {

// Deterministic, platform-independent RNG (splitmix64 core). All sampling in
// the library goes through this so that a seed pins down every output bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; two uniforms per draw, no cached spare.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    bool coin() { return (next_u64() & 1ull) != 0; }

    // Independent substream addressed by (this stream, salt).
    Rng fork(std::uint64_t salt) const {
        std::uint64_t z = state_ ^ (0xD1B54A32D192ED03ull * (salt + 1));
        z = (z ^ (z >> 29)) * 0xFF51AFD7ED558CCDull;
        z = (z ^ (z >> 32)) * 0xC4CEB9FE1A85EC53ull;
        return Rng(z ^ (z >> 29));
    }

private:
    std::uint64_t state_;
};

}  // namespace latree
