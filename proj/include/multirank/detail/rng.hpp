#pragma once

#include <cstdint>

namespace multirank::detail {

// Counter-based randomness: every decision is a pure hash of
// (seed, stream tag, counters), so graph generation is reproducible,
// order-independent, and adding layers never reshuffles earlier draws.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

template <typename... Rest>
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v, Rest... rest) {
    return hash_combine(hash_combine(h, v), static_cast<std::uint64_t>(rest)...);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Stream tags keep unrelated decision families statistically independent.
inline constexpr std::uint64_t kStreamBaseEdge = 0x6d756c7469724230ULL;
inline constexpr std::uint64_t kStreamLayerCoin = 0x6d756c7469724231ULL;
inline constexpr std::uint64_t kStreamLayerPick = 0x6d756c7469724232ULL;
inline constexpr std::uint64_t kStreamWeight = 0x6d756c7469724233ULL;
inline constexpr std::uint64_t kStreamInstance = 0x6d756c7469724234ULL;

template <typename... Counters>
inline double unit_draw(std::uint64_t seed, std::uint64_t stream, Counters... counters) {
    return to_unit(hash_combine(splitmix64(seed), stream, static_cast<std::uint64_t>(counters)...));
}

}  // namespace multirank::detail
