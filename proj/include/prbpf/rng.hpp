#pragma once

#include <cstdint>
#include <random>

namespace prbpf {

// Finalizer from the splitmix64 generator; good avalanche, cheap.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed. Used so that
// per-frame / per-object randomness does not depend on evaluation order.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                           std::uint64_t index = 0) {
    return mix64(mix64(master ^ 0x6a09e667f3bcc908ULL) + mix64(stream) + index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace prbpf
