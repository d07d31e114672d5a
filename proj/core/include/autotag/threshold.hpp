#pragma once

#include "autotag/image.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace autotag {

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram_of(const GrayImage& img);

/// Otsu level L: classes are {<= L} and {> L}; L maximizes the between-class
/// variance w0*w1*(mu0 - mu1)^2. Comparisons are exact (integer rationals).
/// When several levels share the maximum, returns floor((first + last) / 2)
/// of the maximizing set.
///
/// Throws Degenerate when every sample has the same intensity, and
/// std::invalid_argument for an empty histogram or one whose total exceeds
/// 2^29 samples (the exact-arithmetic bound).
int otsu_threshold(std::span<const std::uint64_t, 256> histogram);

/// Foreground iff intensity < local_mean - offset. The mean is taken over the
/// window x window neighbourhood clipped to the image. Window must be odd,
/// >= 3 and no larger than min(width, height); otherwise WindowTooLarge (size)
/// or std::invalid_argument (parity).
BinaryImage binarize_adaptive(const GrayImage& gray, int window, int offset);

} // namespace autotag
