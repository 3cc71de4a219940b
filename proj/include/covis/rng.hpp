#pragma once

#include <cstdint>
#include <random>

namespace covis {

// std::mt19937 is bit-stable across platforms; the std distributions are not.
// These helpers keep every seeded draw reproducible.

inline float rand_unit(std::mt19937& rng) {
    // 24 high bits -> [0, 1) exactly representable in float
    return static_cast<float>(rng() >> 8) * (1.0f / 16777216.0f);
}

inline float rand_range(std::mt19937& rng, float lo, float hi) {
    return lo + (hi - lo) * rand_unit(rng);
}

inline std::uint32_t rand_index(std::mt19937& rng, std::uint32_t n) {
    return n ? rng() % n : 0;
}

// Splits a base seed into independent per-purpose streams.
inline std::uint32_t derive_seed(std::uint32_t base, std::uint32_t salt) {
    std::uint64_t h = (static_cast<std::uint64_t>(base) << 32) | salt;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ULL;
    h ^= h >> 33;
    return static_cast<std::uint32_t>(h);
}

}  // namespace covis
