#pragma once

#include <cstdint>
#include <random>

namespace niss {

// splitmix64 step; used to derive independent stream seeds from (seed, tag).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_tag) {
    return mix64(mix64(seed) ^ stream_tag);
}

// Uniform double in [0,1) from the top 53 bits of the generator output.
// std::generate_canonical is implementation-defined; this is not.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace niss
