#pragma once
// Counter-based pseudo-random numbers.
//
// Sample i is a pure function of (seed, i): we run Vigna's splitmix64
// finalizer twice over a Weyl-advanced counter.  No generator state is
// shared between threads, so scans can be partitioned arbitrarily without
// changing a single drawn value.  Reference vectors live in the test suite.

#include <cstdint>

namespace cklat {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rng_at(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed + 0x9e3779b97f4a7c15ull * index));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(rng_at(seed, index) >> 11) * 0x1.0p-53;
}

}  // namespace cklat
