#pragma once

#include <cstdint>
#include <vector>

namespace invc {

// splitmix64: state advances by the golden-ratio increment 0x9E3779B97F4A7C15,
// output is mixed with the 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB constants.
// Small, seedable, and identical on every platform, which is what the
// dataset/training reproducibility contracts need.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // uniform integer in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

// Fisher-Yates permutation of 0..count-1, driven by splitmix64 so the order
// is reproducible from the recorded seed alone.
inline std::vector<std::size_t> shuffled_indices(std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = count; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace invc
