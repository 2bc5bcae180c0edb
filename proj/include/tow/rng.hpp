#pragma once

#include <cstdint>

namespace tow {

// SplitMix64 used as a counter-based generator: the i-th output of a stream
// is a pure function of (key, i), so draws can be indexed in any order and
// results do not depend on scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed + 0x9E3779B97F4A7C15ULL * mix64(stream + 1))) {}

    std::uint64_t draw(std::uint64_t counter) const {
        return mix64(key_ + 0x9E3779B97F4A7C15ULL * (counter + 1));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01(std::uint64_t counter) const {
        return static_cast<double>(draw(counter) >> 11) * 0x1.0p-53;
    }

    bool coin(std::uint64_t counter) const { return (draw(counter) >> 63) != 0; }

private:
    std::uint64_t key_;
};

} // namespace tow
