#pragma once

#include <cstdint>
#include <random>

namespace ccsim {

/// Deterministic pseudo-random source. Derives all values from the raw
/// mt19937_64 stream so results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(eng_() % span);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace ccsim
