#include "autotag/cells.hpp"
#include "autotag/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace autotag;

namespace {

// Border ring black, payload = rotate_bits(codeword, k).
CellGrid grid_for(const MarkerDictionary& d, int id, int k)
{
    const int n = d.cells;
    const BitMatrix payload = rotate_bits(d.codewords[id], k);
    CellGrid g{BitMatrix(n + 2), std::vector<double>((n + 2) * (n + 2), 1.0)};
    for (int r = 0; r < n + 2; ++r) {
        for (int c = 0; c < n + 2; ++c) {
            const bool border = r == 0 || c == 0 || r == n + 1 || c == n + 1;
            g.bits.set(r, c, border || payload(r - 1, c - 1));
        }
    }
    return g;
}

// Independent nearest-codeword search: (id, k, distance) minimizing
// hamming(payload, rotate(codeword, k)); ties across ids reported as id -1.
std::tuple<int, int, int> brute_nearest(const MarkerDictionary& d, const CellGrid& g)
{
    const int n = d.cells;
    std::vector<std::vector<int>> payload(n, std::vector<int>(n));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            payload[r][c] = g.bits(r + 1, c + 1);
        }
    }
    int best = 1 << 30;
    int best_id = -1;
    int best_k = 0;
    bool tie = false;
    for (int id = 0; id < d.size(); ++id) {
        for (int k = 0; k < 4; ++k) {
            const int e = oracle::grid_hamming(
                payload, oracle::rotate_grid(oracle::grid_of(d.codewords[id]), k));
            if (e < best) {
                best = e;
                best_id = id;
                best_k = k;
                tie = false;
            } else if (e == best && id != best_id) {
                tie = true;
            }
        }
    }
    return {tie ? -1 : best_id, best_k, best};
}

GrayImage canonical_of(const BitMatrix& cells, int px, std::uint8_t black, std::uint8_t white)
{
    const int total = cells.size();
    GrayImage g(total * px, total * px);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            g.at(x, y) = cells(y / px, x / px) ? black : white;
        }
    }
    return g;
}

} // namespace

TEST(ReadCells, RenderThenReadRecoversGrid)
{
    const auto& d = fixture::standard_dictionary();
    for (int id = 0; id < d.size(); ++id) {
        const CellGrid expected = grid_for(d, id, 0);
        const GrayImage img = canonical_of(expected.bits, 8, 0, 255);
        const CellGrid got = read_cells(img, 7, 0.2);
        ASSERT_EQ(got.bits, expected.bits) << "id " << id;
        ASSERT_EQ(got.margins.size(), 49u);
    }
}

TEST(ReadCells, UniformImageIsDegenerate)
{
    EXPECT_THROW(read_cells(GrayImage(56, 56, 0), 7, 0.2), Degenerate);
}

TEST(ReadCells, CheckerboardMarginsAreUnanimous)
{
    BitMatrix cells(7);
    for (int r = 0; r < 7; ++r) {
        for (int c = 0; c < 7; ++c) {
            cells.set(r, c, (r + c) % 2 == 0);
        }
    }
    const CellGrid got = read_cells(canonical_of(cells, 8, 50, 200), 7, 0.2);
    EXPECT_EQ(got.bits, cells);
    for (double m : got.margins) {
        EXPECT_DOUBLE_EQ(m, 1.0);
    }
}

TEST(ReadCells, NonDivisibleSideUsesContinuousBoundaries)
{
    const auto& d = fixture::standard_dictionary();
    const CellGrid expected = grid_for(d, 4, 0);
    // 7 cells over 59 px: boundaries at multiples of 59/7.
    GrayImage img(59, 59);
    for (int y = 0; y < 59; ++y) {
        for (int x = 0; x < 59; ++x) {
            const int cx = static_cast<int>((x + 0.5) * 7 / 59);
            const int cy = static_cast<int>((y + 0.5) * 7 / 59);
            img.at(x, y) = expected.bits(cy, cx) ? 10 : 240;
        }
    }
    EXPECT_EQ(read_cells(img, 7, 0.2).bits, expected.bits);
}

TEST(DecodeCells, ExactCodeword)
{
    const auto& d = fixture::standard_dictionary();
    const DecodeResult r = decode_cells(grid_for(d, 3, 0), d);
    EXPECT_EQ(r.status, DecodeStatus::Accepted);
    EXPECT_EQ(r.id, 3);
    EXPECT_EQ(r.rotation, 0);
    EXPECT_EQ(r.corrected_bits, 0);
    EXPECT_DOUBLE_EQ(r.confidence, 1.0);
}

TEST(DecodeCells, RotatedWithOneFlip)
{
    const auto& d = fixture::standard_dictionary();
    CellGrid g = grid_for(d, 5, 2);
    g.bits.flip(2, 3);
    const auto [oid, ok, oe] = brute_nearest(d, g);
    ASSERT_EQ(oid, 5);
    ASSERT_EQ(ok, 2);
    ASSERT_EQ(oe, 1);
    const DecodeResult r = decode_cells(g, d);
    EXPECT_EQ(r.status, DecodeStatus::Accepted);
    EXPECT_EQ(r.id, 5);
    EXPECT_EQ(r.rotation, 2);
    EXPECT_EQ(r.corrected_bits, 1);
    EXPECT_DOUBLE_EQ(r.confidence, 0.75);
}

TEST(DecodeCells, WhiteBorderCellIsRejected)
{
    const auto& d = fixture::standard_dictionary();
    for (int i = 0; i < 7; ++i) {
        CellGrid g = grid_for(d, 0, 0);
        g.bits.set(0, i, false);
        EXPECT_EQ(decode_cells(g, d).status, DecodeStatus::BorderViolation);
        CellGrid h = grid_for(d, 0, 0);
        h.bits.set(i, 6, false);
        EXPECT_EQ(decode_cells(h, d).status, DecodeStatus::BorderViolation);
    }
}

TEST(DecodeCells, FarPayloadIsRejected)
{
    const auto& d = fixture::standard_dictionary();
    std::mt19937_64 rng(31);
    int rejected = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        CellGrid g = grid_for(d, 0, 0);
        for (int r = 1; r <= 5; ++r) {
            for (int c = 1; c <= 5; ++c) {
                g.bits.set(r, c, (rng() & 1) != 0);
            }
        }
        const auto [oid, ok, oe] = brute_nearest(d, g);
        const DecodeResult res = decode_cells(g, d);
        if (oe > 3) {
            EXPECT_EQ(res.status, DecodeStatus::NoCodewordWithinT);
            ++rejected;
        } else if (oid < 0) {
            EXPECT_EQ(res.status, DecodeStatus::Ambiguous);
        } else {
            EXPECT_EQ(res.status, DecodeStatus::Accepted);
            EXPECT_EQ(res.id, oid);
            EXPECT_EQ(res.corrected_bits, oe);
        }
    }
    EXPECT_GT(rejected, 0);
}

TEST(DecodeCells, EquidistantIdsAreAmbiguous)
{
    // Two codewords at distance 2; the payload halfway between them ties.
    MarkerDictionary d;
    d.cells = 3;
    d.tau = 3;
    d.codewords = {BitMatrix::from_rows({"110", "000", "000"}),
                   BitMatrix::from_rows({"101", "000", "000"})};
    CellGrid g{BitMatrix(5), std::vector<double>(25, 1.0)};
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            g.bits.set(r, c, r == 0 || c == 0 || r == 4 || c == 4);
        }
    }
    g.bits.set(1, 1, true);
    // payload 100/000/000: distance 1 to both codewords.
    const DecodeResult r = decode_cells(g, d);
    EXPECT_EQ(r.status, DecodeStatus::Ambiguous);
}

TEST(DecodeCells, ErrorCorrectionUpToCapacity)
{
    const auto& d = fixture::standard_dictionary();
    for (int id = 0; id < d.size(); ++id) {
        for (int k = 0; k < 4; ++k) {
            const CellGrid base = grid_for(d, id, k);
            for (int a = 0; a < 25; ++a) {
                for (int b = a + 1; b < 25; ++b) {
                    CellGrid g = base;
                    g.bits.flip(1 + a / 5, 1 + a % 5);
                    g.bits.flip(1 + b / 5, 1 + b % 5);
                    const DecodeResult r = decode_cells(g, d);
                    ASSERT_TRUE(r.accepted());
                    ASSERT_EQ(r.id, id);
                    ASSERT_EQ(r.rotation, k);
                    ASSERT_EQ(r.corrected_bits, 2);
                }
            }
        }
    }
}

TEST(DecodeCells, GridSizeMismatchThrows)
{
    const auto& d = fixture::standard_dictionary();
    CellGrid g{BitMatrix(6), std::vector<double>(36, 1.0)};
    EXPECT_THROW(decode_cells(g, d), DimensionMismatch);
}

TEST(DecodeConfidence, Formula)
{
    EXPECT_DOUBLE_EQ(decode_confidence(0, 3), 1.0);
    EXPECT_DOUBLE_EQ(decode_confidence(3, 3), 0.25);
    EXPECT_DOUBLE_EQ(decode_confidence(0, 0), 1.0);
}
