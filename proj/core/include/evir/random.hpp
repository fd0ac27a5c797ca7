#pragma once

#include <cstdint>

namespace evir {

/// Deterministic counter-based random stream (splitmix64).
///
/// The state is a 64-bit counter advanced by a fixed odd increment; each
/// output is a bijective mix of the counter, so the draw sequence for a
/// given seed is identical on every platform. Substreams derived from
/// (seed, index) are statistically independent for distinct indices.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // 64-bit multiply-shift; bias is negligible for n << 2^64.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Independent stream derived from this stream's seed and an index.
    RandomStream substream(std::uint64_t index) const {
        return RandomStream(mix(seed_ ^ mix(index + 0x632BE59BD9B4E019ULL)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace evir
