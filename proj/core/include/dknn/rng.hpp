#pragma once

#include <cstdint>

namespace dknn {

/// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
/// <random> distributions so runs are bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Stream for machine `index` in trial `trial` of a run seeded `seed`.
    Rng(std::uint64_t seed, std::uint64_t index, std::uint64_t trial)
        : state_(mix(mix(seed) ^ mix(index + 0x9e3779b97f4a7c15ull) ^
                     mix(trial + 0x517cc1b727220a95ull))) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n), bias-free by rejection. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace dknn
