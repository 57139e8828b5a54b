#pragma once

#include <cstdint>

namespace pinch {

// SplitMix64 finaliser (Steele, Lea, Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-stream seed: splitmix64(splitmix64(splitmix64(base) ^ a) ^ b).
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0)
{
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

} // namespace pinch
