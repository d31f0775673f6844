#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace v2x {

using Rng = std::mt19937_64;

/// Named substreams derived from one master seed.
enum class Stream : std::uint64_t {
    scenario = 1,
    channel = 2,
    exploration = 3,
    replay = 4,
    weight_init = 5,
    baseline = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based split: substream i of seed s is seeded with mix(mix(s) + i).
inline Rng make_stream(std::uint64_t master_seed, Stream stream, std::uint64_t index = 0) {
    const std::uint64_t base = splitmix64(master_seed);
    const std::uint64_t key = splitmix64(base + static_cast<std::uint64_t>(stream) * 0x100000000ULL + index);
    return Rng(key);
}

/// Uniform real in [0, 1) with 53 random bits; independent of the standard library's distributions.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_index(Rng& rng, int n) {
    return static_cast<int>(uniform01(rng) * n);
}

/// Box-Muller; consumes two draws.
inline double standard_normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace v2x
