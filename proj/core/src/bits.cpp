#include "autotag/bits.hpp"

#include "autotag/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace autotag {

BitMatrix::BitMatrix(int n) : n_(n)
{
    if (n < 3) {
        throw std::invalid_argument("BitMatrix side must be >= 3");
    }
    cells_.assign(static_cast<std::size_t>(n) * n, 0);
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows)
{
    const int n = static_cast<int>(rows.size());
    BitMatrix m(n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) {
            throw std::invalid_argument("BitMatrix row " + std::to_string(r) + " has length " +
                                        std::to_string(rows[r].size()) + ", expected " +
                                        std::to_string(n));
        }
        for (int c = 0; c < n; ++c) {
            const char ch = rows[r][c];
            if (ch != '0' && ch != '1') {
                throw std::invalid_argument("BitMatrix rows may only contain '0' and '1'");
            }
            m.set(r, c, ch == '1');
        }
    }
    return m;
}

std::vector<std::string> BitMatrix::to_rows() const
{
    std::vector<std::string> rows(n_, std::string(n_, '0'));
    for (int r = 0; r < n_; ++r) {
        for (int c = 0; c < n_; ++c) {
            if ((*this)(r, c)) {
                rows[r][c] = '1';
            }
        }
    }
    return rows;
}

BitMatrix rotate_bits(const BitMatrix& bits, int quarter_turns)
{
    const int k = ((quarter_turns % 4) + 4) % 4;
    if (k == 0) {
        return bits;
    }
    const int n = bits.size();
    BitMatrix out(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            bool v = false;
            switch (k) {
            case 1: v = bits(n - 1 - c, r); break;
            case 2: v = bits(n - 1 - r, n - 1 - c); break;
            default: v = bits(c, n - 1 - r); break;
            }
            out.set(r, c, v);
        }
    }
    return out;
}

int hamming(const BitMatrix& a, const BitMatrix& b)
{
    if (a.size() != b.size()) {
        throw DimensionMismatch("bit matrices of side " + std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    }
    int d = 0;
    const int n = a.size();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            d += a(r, c) != b(r, c) ? 1 : 0;
        }
    }
    return d;
}

int rotational_distance(const BitMatrix& a, const BitMatrix& b)
{
    int best = hamming(a, b);
    for (int k = 1; k < 4 && best > 0; ++k) {
        best = std::min(best, hamming(a, rotate_bits(b, k)));
    }
    return best;
}

int self_rotation_distance(const BitMatrix& bits)
{
    int best = bits.count();
    for (int k = 1; k < 4; ++k) {
        best = std::min(best, hamming(bits, rotate_bits(bits, k)));
    }
    return best;
}

} // namespace autotag
