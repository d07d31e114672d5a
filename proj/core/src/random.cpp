#include "autotag/random.hpp"

#include <cmath>
#include <stdexcept>

namespace autotag {

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) {
        throw std::invalid_argument("uniform_int: empty range");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(rng());
    }
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
}

double standard_normal(Rng& rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace autotag
