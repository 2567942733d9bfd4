#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qmle {

// SplitMix64 finalizer; used to derive independent per-trial streams from a
// master seed so results do not depend on scheduling order.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t x : path) h = mix64(h ^ x);
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

inline constexpr std::uint64_t kDefaultSeed = 0x51a9e1ull;

}  // namespace qmle
