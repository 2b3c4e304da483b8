#pragma once

#include <cstdint>
#include <random>

namespace abcmeta::rng {

// splitmix64 finalizer; used to mix seed material into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d4a38a4602b3afULL ^ 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b * 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                         std::uint64_t d) {
    return mix(mix(a, b, c), d);
}

// Engine for one logical stream. Results depend only on the seed material,
// never on which thread runs the stream.
inline std::mt19937_64 engine_for(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(mix(seed, stream));
}

}  // namespace abcmeta::rng
