#pragma once

#include "autotag/bits.hpp"
#include "autotag/dictionary.hpp"
#include "autotag/image.hpp"

#include <vector>

namespace autotag {

struct CellGrid
{
    BitMatrix bits;               // (n + 2) x (n + 2), border included
    std::vector<double> margins;  // |black - white| / counted, row-major
};

/// Otsu-binarizes the canonical image from its own histogram, then each cell
/// votes over its central (1 - 2 * margin)^2 region; ties count as black.
/// Propagates Degenerate for a uniform image.
CellGrid read_cells(const GrayImage& canonical, int total_cells, double sampling_margin);

enum class DecodeStatus
{
    Accepted,
    BorderViolation,
    NoCodewordWithinT,
    Ambiguous,
};

const char* to_string(DecodeStatus s) noexcept;

struct DecodeResult
{
    DecodeStatus status = DecodeStatus::NoCodewordWithinT;
    int id = -1;
    int rotation = 0;  // payload == rotate_bits(codeword, rotation)
    int corrected_bits = 0;
    double confidence = 0.0;

    bool accepted() const noexcept { return status == DecodeStatus::Accepted; }
};

/// Nearest codeword over all ids and quarter-turns. Throws DimensionMismatch
/// if the grid side is not dict.cells + 2.
DecodeResult decode_cells(const CellGrid& grid, const MarkerDictionary& dict);

/// 1 - e / (t + 1)
double decode_confidence(int corrected_bits, int capacity) noexcept;

} // namespace autotag
