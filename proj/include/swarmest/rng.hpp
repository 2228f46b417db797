#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "swarmest/geometry.hpp"

namespace swarmest {

/// splitmix64 finalizer; used for counter-based seed splitting.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive an independent sub-seed from (master, index). Pure counter split,
/// so stream k does not depend on how many other streams exist.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL));
}

/// Seeded random stream. mt19937_64 is bit-portable across platforms; the
/// variate transforms are hand-rolled because the std distributions are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform on [-1, 1].
    double uniform_sym() { return uniform(-1.0, 1.0); }

    /// Uniform on (-pi, pi].
    double uniform_angle() { return kPi - 2.0 * kPi * uniform01(); }

    /// Standard normal, Box-Muller cosine branch. Consumes exactly 2 uniforms.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace swarmest
