#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wrmsm {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; good avalanche for counter-based stream derivation.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed from a parent seed and a path of counters, e.g.
/// derive_seed(master, {config, rep}). Distinct paths give independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix64(parent);
    for (auto c : path) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    return s;
}

}  // namespace wrmsm
