#pragma once

#include <cstdint>

namespace epimetric {

/// Counter-based generator: the i-th draw of stream `seed` is a pure function of
/// (seed, i), so parallel or reordered consumers stay reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x9e37))) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + 0x9e3779b97f4a7c15ULL * (counter + 1)); }

    /// Uniform double in [0, 1).
    [[nodiscard]] double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Sequential convenience interface.
    double next() { return uniform(counter_++); }
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace epimetric
