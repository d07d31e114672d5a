#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace autotag {

/// Square grid of binary cells, row-major from the top-left, true = black.
class BitMatrix
{
public:
    BitMatrix() = default;
    explicit BitMatrix(int n);

    /// Builds from n strings of n '0'/'1' characters ('1' = black).
    static BitMatrix from_rows(const std::vector<std::string>& rows);

    int size() const noexcept { return n_; }
    int count() const noexcept { return n_ * n_; }

    bool operator()(int row, int col) const noexcept { return cells_[row * n_ + col] != 0; }
    void set(int row, int col, bool black) noexcept { cells_[row * n_ + col] = black ? 1 : 0; }
    void flip(int row, int col) noexcept { cells_[row * n_ + col] ^= 1; }

    std::vector<std::string> to_rows() const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    int n_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Rotates k quarter-turns clockwise; k is taken modulo 4.
BitMatrix rotate_bits(const BitMatrix& bits, int quarter_turns);

/// Plain cell-wise disagreement count. Throws DimensionMismatch.
int hamming(const BitMatrix& a, const BitMatrix& b);

/// min over k of hamming(a, rotate_bits(b, k)). Throws DimensionMismatch.
int rotational_distance(const BitMatrix& a, const BitMatrix& b);

/// min over k in {1,2,3} of hamming(b, rotate_bits(b, k)).
int self_rotation_distance(const BitMatrix& bits);

} // namespace autotag
