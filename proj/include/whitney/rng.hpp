#pragma once

#include <cstdint>
#include <random>

namespace whitney {

/// Deterministic generator for experiment streams. Uniform doubles are built
/// from the raw 64-bit output so streams are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : engine_() % bound; }

private:
    std::mt19937_64 engine_;
};

} // namespace whitney
