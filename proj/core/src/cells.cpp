#include "autotag/cells.hpp"

#include "autotag/errors.hpp"
#include "autotag/threshold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace autotag {

CellGrid read_cells(const GrayImage& canonical, int total_cells, double sampling_margin)
{
    if (total_cells < 3) {
        throw std::invalid_argument("total_cells must be >= 3");
    }
    if (!(sampling_margin >= 0.0 && sampling_margin < 0.5)) {
        throw std::invalid_argument("sampling margin must lie in [0, 0.5)");
    }
    if (canonical.width != canonical.height || canonical.empty()) {
        throw std::invalid_argument("canonical image must be square and non-empty");
    }
    const Histogram hist = histogram_of(canonical);
    const int level = otsu_threshold(hist);

    const int side = canonical.width;
    const double cell = static_cast<double>(side) / total_cells;
    CellGrid grid{BitMatrix(total_cells),
                  std::vector<double>(static_cast<std::size_t>(total_cells) * total_cells, 0.0)};

    // Pixel index range whose centers fall in [lo, hi).
    const auto span = [side](double lo, double hi) {
        const int first = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
        const int last = std::min(side, static_cast<int>(std::ceil(hi - 0.5)));
        return std::pair{first, last};
    };

    for (int r = 0; r < total_cells; ++r) {
        const auto [y0, y1] = span((r + sampling_margin) * cell, (r + 1 - sampling_margin) * cell);
        for (int c = 0; c < total_cells; ++c) {
            const auto [x0, x1] =
                span((c + sampling_margin) * cell, (c + 1 - sampling_margin) * cell);
            long black = 0;
            long white = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    if (canonical.at(x, y) <= level) {
                        ++black;
                    } else {
                        ++white;
                    }
                }
            }
            grid.bits.set(r, c, black >= white);
            const long counted = black + white;
            grid.margins[static_cast<std::size_t>(r) * total_cells + c] =
                counted > 0 ? static_cast<double>(std::labs(black - white)) / counted : 0.0;
        }
    }
    return grid;
}

const char* to_string(DecodeStatus s) noexcept
{
    switch (s) {
    case DecodeStatus::Accepted: return "accepted";
    case DecodeStatus::BorderViolation: return "border_violation";
    case DecodeStatus::NoCodewordWithinT: return "no_codeword_within_t";
    case DecodeStatus::Ambiguous: return "ambiguous";
    }
    return "unknown";
}

double decode_confidence(int corrected_bits, int capacity) noexcept
{
    return 1.0 - static_cast<double>(corrected_bits) / (capacity + 1);
}

DecodeResult decode_cells(const CellGrid& grid, const MarkerDictionary& dict)
{
    const int n = dict.cells;
    if (grid.bits.size() != n + 2) {
        throw DimensionMismatch("cell grid side " + std::to_string(grid.bits.size()) +
                                " does not match dictionary side " + std::to_string(n + 2));
    }
    DecodeResult result;
    for (int i = 0; i < n + 2; ++i) {
        if (!grid.bits(0, i) || !grid.bits(n + 1, i) || !grid.bits(i, 0) || !grid.bits(i, n + 1)) {
            result.status = DecodeStatus::BorderViolation;
            return result;
        }
    }

    BitMatrix payload(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            payload.set(r, c, grid.bits(r + 1, c + 1));
        }
    }
    // hamming(payload, rot(cw, k)) == hamming(rot(payload, -k), cw)
    std::array<BitMatrix, 4> turned;
    for (int j = 0; j < 4; ++j) {
        turned[j] = rotate_bits(payload, j);
    }

    int best = n * n + 1;
    int best_id = -1;
    int best_rotation = 0;
    bool tie = false;
    for (int id = 0; id < dict.size(); ++id) {
        for (int j = 0; j < 4; ++j) {
            const int d = hamming(turned[j], dict.codewords[id]);
            if (d < best) {
                best = d;
                best_id = id;
                best_rotation = (4 - j) % 4;
                tie = false;
            } else if (d == best && id != best_id) {
                tie = true;
            }
        }
    }

    const int t = correction_capacity(dict);
    if (best_id < 0 || best > t) {
        result.status = DecodeStatus::NoCodewordWithinT;
        return result;
    }
    if (tie) {
        result.status = DecodeStatus::Ambiguous;
        return result;
    }
    result.status = DecodeStatus::Accepted;
    result.id = best_id;
    result.rotation = best_rotation;
    result.corrected_bits = best;
    result.confidence = decode_confidence(best, t);
    return result;
}

} // namespace autotag
