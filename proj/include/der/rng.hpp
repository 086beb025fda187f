#ifndef DER_RNG_HPP_
#define DER_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace der {

// FNV-1a, stable across platforms (std::hash is not guaranteed stable).
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Deterministic per-role random stream: same (seed, role) -> same sequence,
/// different roles -> independent sequences.
inline std::mt19937_64 seed_stream(std::uint64_t seed, std::string_view role) {
    std::uint64_t mix = seed ^ fnv1a(role);
    // splitmix64 to spread low-entropy seeds over the full state space
    auto next = [&mix]() {
        mix += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = mix;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::seed_seq seq{static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next()),
                      static_cast<std::uint32_t>(next()), static_cast<std::uint32_t>(next())};
    return std::mt19937_64(seq);
}

}  // namespace der

#endif  // DER_RNG_HPP_
