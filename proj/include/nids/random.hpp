#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nids {

using Engine = std::mt19937_64;

// SplitMix64 finalizer. Used to turn (seed, stream index) pairs into
// independent engine seeds so results never depend on scheduling.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    return Engine(derive_seed(seed, stream));
}

// Uniform in [0, 1). Fixed construction so streams are reproducible across
// standard library implementations.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = eng();
    while (x >= limit) x = eng();
    return x % n;
}

// Fisher-Yates with uniform_index so the permutation is library-independent.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace nids
