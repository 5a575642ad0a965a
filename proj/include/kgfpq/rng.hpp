#pragma once
// Deterministic seeded RNG. splitmix64 keeps results identical across
// platforms and standard-library versions, which the determinism
// contracts require (std::uniform_int_distribution is
// implementation-defined).

#include <cstdint>
#include <string_view>
#include <vector>

#include "kgfpq/core.hpp"

namespace kgfpq {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) via rejection sampling.
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Derives a stage- or method-scoped sub-seed from a parent seed and a
// textual tag. Stable across runs by construction.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
    return SplitMix64(parent ^ fnv1a(tag)).next();
}

// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace kgfpq
