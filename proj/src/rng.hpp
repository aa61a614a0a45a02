#pragma once

#include <cmath>
#include <cstdint>

#include "numerics.hpp"

namespace specgap {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// The index-th output of a splitmix64 generator seeded with master. Used to
// derive one independent stream per Monte Carlo trial so the result is a
// deterministic function of (master seed, trial index) regardless of how
// trials are distributed over workers.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix_finalize(master + (index + 1) * kSplitMixGamma);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kSplitMixGamma;
        return splitmix_finalize(state_);
    }

    // uniform on (0, 1]; never 0, so logs are safe
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Box-Muller pair of independent standard normals.
    void normal_pair(double& z0, double& z1) {
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = kTwoPi * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

private:
    std::uint64_t state_;
};

} // namespace specgap
