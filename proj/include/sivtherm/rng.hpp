#pragma once
#include <cstdint>
#include <random>

namespace sivtherm {

/// All stochastic operations take an explicit 64-bit seed and build their own
/// engine from it, so results are a pure function of (inputs, seed).
using RngEngine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministically derive an independent stream seed from a base seed.
/// Concurrent repeats/walkers each get derive_seed(base, index); never share
/// one engine across logical streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

inline RngEngine make_engine(std::uint64_t seed) {
    return RngEngine(splitmix64(seed));
}

} // namespace sivtherm
