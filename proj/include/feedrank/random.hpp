#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace feedrank {

// std::mt19937_64's output sequence is fixed by the standard; the standard
// distributions are not, so bounded draws and shuffles are done here to keep
// seeded runs identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). `bound` must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = uniform_below(rng, i);
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

/// Mixes a base seed with a stream index into an independent seed (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace feedrank
