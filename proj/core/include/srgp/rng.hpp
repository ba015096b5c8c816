#pragma once

#include <cstdint>
#include <random>

namespace srgp {

/// splitmix64 round; used to decorrelate seed material before feeding mt19937_64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-candidate stream keyed by (seed, generation, index).
/// Parallel evaluation order cannot change what any candidate draws.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(generation + 0x1000000001ULL));
    s = mix64(s ^ mix64(index + 0x2000000003ULL));
    return std::mt19937_64(s);
}

} // namespace srgp
