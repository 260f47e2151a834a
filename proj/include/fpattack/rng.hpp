#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpattack {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a sequence of words into one 64-bit seed. Order matters, so
/// (base, K, trial, stage) tuples map to disjoint streams.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
    return h;
}

// Stage tags keep generation/attack/forgery/detection draws independent.
enum class Stage : std::uint64_t {
    Code = 1,
    Host = 2,
    Coalition = 3,
    Attack = 4,
    Forgery = 5,
    Detection = 6,
    Calibration = 7,
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline Rng make_rng(std::uint64_t seed, Stage stage) {
    return Rng(mix_seed({seed, static_cast<std::uint64_t>(stage)}));
}

}  // namespace fpattack
