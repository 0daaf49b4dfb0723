#pragma once

#include <cstdint>

namespace polymatch {

// splitmix64 (Steele et al.). Used everywhere randomness is needed so that
// results are reproducible across standard libraries and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0, bound), rejection-sampled to stay unbiased
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~0ull - (~0ull % bound) - 1;
        std::uint64_t x;
        do {
            x = next();
        } while (x > limit);
        return x % bound;
    }

    // uniform real in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

// Derives an independent child seed (e.g. one per stream index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    return s.next();
}

} // namespace polymatch
