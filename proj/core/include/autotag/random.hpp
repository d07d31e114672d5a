#pragma once

#include <cstdint>
#include <random>

namespace autotag {

// Engine used by every stochastic operation. Distributions below are written
// out by hand so sequences do not depend on the standard library vendor.
using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// [0, 1)
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// [lo, hi)
inline double uniform(Rng& rng, double lo, double hi) noexcept
{
    return lo + (hi - lo) * uniform01(rng);
}

// Integer in [lo, hi], inclusive.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

} // namespace autotag
