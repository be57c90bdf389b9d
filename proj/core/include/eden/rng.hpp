#pragma once

#include <cmath>
#include <cstdint>

namespace eden {

// splitmix64, version 1 (see version.hpp).  Counter-based: the state advances
// by a fixed odd constant and the output is a bijective mix of the counter,
// so streams are reproducible across platforms and trivially seedable.
// Floating-point draws go through inverse-CDF on (0,1) only, keeping
// trajectories bit-stable for a fixed seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased uniform draw from [0, n) (Lemire's multiply-shift with the
    // low-word rejection step).
    std::uint64_t bounded(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform on the open interval (0,1): 53-bit mantissa, half-step offset
    // keeps both endpoints excluded.
    double unit_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential with the given mean via inverse CDF; strictly positive.
    double exponential(double mean) { return -mean * std::log(unit_open()); }

private:
    std::uint64_t state_;
};

}  // namespace eden
