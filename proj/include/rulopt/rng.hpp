#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rulopt {

// Seeded random helpers built directly on mt19937_64 output so that streams
// are reproducible across standard library implementations (the distribution
// classes in <random> are not pinned by the standard).

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

// Box-Muller transform; one draw consumes two generator words.
inline double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Exponential variate with the given rate.
inline double exponential(std::mt19937_64& rng, double rate) {
    double u = uniform01(rng);
    if (u <= 0.0)
        u = 0x1.0p-53;
    return -std::log(u) / rate;
}

} // namespace rulopt
