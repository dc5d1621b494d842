#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace lining {

/// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed component derived from a double's bit pattern, so that seeds tied to
/// hyper-parameter values do not depend on enumeration order.
inline std::uint64_t seed_of(double v) {
    return std::bit_cast<std::uint64_t>(v);
}

using Rng = std::mt19937_64;

} // namespace lining
