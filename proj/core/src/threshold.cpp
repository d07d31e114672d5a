#include "autotag/threshold.hpp"

#include "autotag/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace autotag {

namespace {

__extension__ typedef unsigned __int128 u128;

// Exact comparison of p1/q1 and p2/q2 (q > 0) by walking the continued
// fraction expansions; never multiplies, so nothing overflows.
int compare_fractions(u128 p1, u128 q1, u128 p2, u128 q2)
{
    for (;;) {
        const u128 a1 = p1 / q1;
        const u128 a2 = p2 / q2;
        if (a1 != a2) {
            return a1 < a2 ? -1 : 1;
        }
        const u128 r1 = p1 % q1;
        const u128 r2 = p2 % q2;
        if (r1 == 0 || r2 == 0) {
            if (r1 == r2) {
                return 0;
            }
            return r1 == 0 ? -1 : 1;
        }
        // r1/q1 < r2/q2  <=>  q2/r2 < q1/r1
        const u128 np1 = q2;
        const u128 nq1 = r2;
        const u128 np2 = q1;
        const u128 nq2 = r1;
        p1 = np1;
        q1 = nq1;
        p2 = np2;
        q2 = nq2;
    }
}

constexpr std::uint64_t kMaxOtsuSamples = std::uint64_t{1} << 29;

} // namespace

Histogram histogram_of(const GrayImage& img)
{
    Histogram h{};
    for (std::uint8_t v : img.data) {
        ++h[v];
    }
    return h;
}

int otsu_threshold(std::span<const std::uint64_t, 256> histogram)
{
    std::uint64_t total = 0;
    std::uint64_t sum = 0;
    int occupied = 0;
    for (int i = 0; i < 256; ++i) {
        total += histogram[i];
        sum += histogram[i] * static_cast<std::uint64_t>(i);
        occupied += histogram[i] > 0 ? 1 : 0;
    }
    if (total == 0) {
        throw std::invalid_argument("otsu_threshold: empty histogram");
    }
    if (total > kMaxOtsuSamples) {
        throw std::invalid_argument("otsu_threshold: more than 2^29 samples");
    }
    if (occupied < 2) {
        throw Degenerate("otsu_threshold: all samples share one intensity");
    }

    // sigma_b^2 * N^2 = (s0*n1 - s1*n0)^2 / (n0*n1); the N^2 factor is common.
    u128 best_num = 0;
    u128 best_den = 1;
    int first = 0;
    int last = 0;
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (int level = 0; level < 256; ++level) {
        n0 += histogram[level];
        s0 += histogram[level] * static_cast<std::uint64_t>(level);
        const std::uint64_t n1 = total - n0;
        const std::uint64_t s1 = sum - s0;
        u128 num = 0;
        u128 den = 1;
        if (n0 > 0 && n1 > 0) {
            const u128 a = static_cast<u128>(s0) * n1;
            const u128 b = static_cast<u128>(s1) * n0;
            const u128 d = a > b ? a - b : b - a;
            num = d * d;
            den = static_cast<u128>(n0) * n1;
        }
        const int c = compare_fractions(num, den, best_num, best_den);
        if (level == 0 || c > 0) {
            best_num = num;
            best_den = den;
            first = last = level;
        } else if (c == 0) {
            last = level;
        }
    }
    return (first + last) / 2;
}

BinaryImage binarize_adaptive(const GrayImage& gray, int window, int offset)
{
    if (window < 3 || window % 2 == 0) {
        throw std::invalid_argument("adaptive window must be odd and >= 3");
    }
    if (window > std::min(gray.width, gray.height)) {
        throw WindowTooLarge("window " + std::to_string(window) + " exceeds image side " +
                             std::to_string(std::min(gray.width, gray.height)));
    }
    const int w = gray.width;
    const int h = gray.height;
    // Summed-area table with a zero row/column in front.
    std::vector<std::int64_t> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        std::int64_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += gray.at(x, y);
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    const int r = window / 2;
    BinaryImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r);
        const int y1 = std::min(h - 1, y + r) + 1;
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r);
            const int x1 = std::min(w - 1, x + r) + 1;
            const std::int64_t s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] -
                                   sat[y1 * (w + 1) + x0] + sat[y0 * (w + 1) + x0];
            const std::int64_t count = static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
            // I < s/count - offset, in integers.
            out.set(x, y, (gray.at(x, y) + static_cast<std::int64_t>(offset)) * count < s);
        }
    }
    return out;
}

} // namespace autotag
