#pragma once

#include <cstdint>

namespace wgstab {

/// Small deterministic generator (splitmix64).  Every randomized component
/// draws from a stream derived from (seed, index), so results are identical
/// across platforms and independent of evaluation order.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 significant bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

private:
    std::uint64_t state_;
};

/// Independent stream for task `index` under a run seed.
inline SplitMix substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix mix(seed);
    const std::uint64_t base = mix.next();
    return SplitMix(base ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

}  // namespace wgstab
