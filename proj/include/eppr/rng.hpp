#pragma once

#include <cstdint>
#include <random>

namespace eppr {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of `seed`. Streams for different indices are
/// independent of how many siblings exist, so growing an ensemble leaves the
/// earlier members untouched.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(stream_seed(seed, index));
}

}  // namespace eppr
