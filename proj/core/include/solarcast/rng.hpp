#pragma once

#include <cstdint>
#include <random>

namespace solarcast {

using Rng = std::mt19937_64;

/// Derive an independent child stream from a parent seed and a stream tag.
/// Keeps every pipeline stage deterministic under a single top-level seed.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, stream ^ std::uint64_t{0x9e3779b97f4a7c15}};
    return Rng(seq);
}

inline double rand_uniform(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double rand_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace solarcast
