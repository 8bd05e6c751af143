#pragma once

#include <cstdint>
#include <random>

namespace drsim {

// Every random draw in the library goes through an explicitly passed engine,
// so independent replicates can own independent streams.
using RngStream = std::mt19937_64;

namespace detail {

// splitmix64 finalizer (Steele, Lea & Flood). Full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

// Keyed mix of four integers into one 64-bit seed. Absorbing each word
// through the finalizer keeps streams for (a,b,c) tuples that differ in a
// single component far apart.
inline std::uint64_t mix_seed(std::uint64_t key, std::uint64_t a,
                              std::uint64_t b, std::uint64_t c) {
    std::uint64_t s = detail::mix64(key);
    s = detail::mix64(s ^ detail::mix64(a));
    s = detail::mix64(s ^ detail::mix64(b));
    s = detail::mix64(s ^ detail::mix64(c));
    return s;
}

inline RngStream make_stream(std::uint64_t seed) { return RngStream(seed); }

} // namespace drsim
