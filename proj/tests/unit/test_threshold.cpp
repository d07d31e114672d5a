#include "autotag/errors.hpp"
#include "autotag/threshold.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace autotag;

TEST(Otsu, TwoSpikesTakeMidpointOfPlateau)
{
    Histogram h{};
    h[10] = 500;
    h[200] = 500;
    EXPECT_EQ(otsu_threshold(h), 104);
}

TEST(Otsu, SingleSpikeIsDegenerate)
{
    Histogram h{};
    h[77] = 1000;
    EXPECT_THROW(otsu_threshold(h), Degenerate);
}

TEST(Otsu, EmptyAndOversizedHistogramsAreRejected)
{
    Histogram h{};
    EXPECT_THROW(otsu_threshold(h), std::invalid_argument);
    h[0] = 1ULL << 29;
    h[255] = 1;
    EXPECT_THROW(otsu_threshold(h), std::invalid_argument);
}

TEST(Otsu, LevelsAtTheExtremes)
{
    Histogram h{};
    h[0] = 3;
    h[1] = 1;
    EXPECT_EQ(otsu_threshold(h), 0);
    Histogram g{};
    g[254] = 1;
    g[255] = 9;
    EXPECT_EQ(otsu_threshold(g), 254);
}

TEST(Otsu, MatchesExactOracleOnRandomHistograms)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        Histogram h{};
        const int shape = trial % 3;
        for (int v = 0; v < 256; ++v) {
            if (shape == 0) {
                h[v] = rng() % 1000;
            } else if (shape == 1) {
                h[v] = (rng() % 8 == 0) ? rng() % 5000 : 0;
            } else {
                h[v] = rng() % 3;
            }
        }
        const auto expected = oracle::otsu(h);
        if (!expected) {
            EXPECT_THROW(otsu_threshold(h), Degenerate);
            continue;
        }
        ASSERT_EQ(otsu_threshold(h), *expected) << "trial " << trial;
    }
}

TEST(Otsu, HistogramOfImage)
{
    GrayImage g(4, 2, 9);
    g.at(3, 1) = 200;
    const Histogram h = histogram_of(g);
    EXPECT_EQ(h[9], 7u);
    EXPECT_EQ(h[200], 1u);
}

TEST(AdaptiveBinarize, UniformImageIsBackground)
{
    const GrayImage g(40, 30, 128);
    const BinaryImage b = binarize_adaptive(g, 7, 1);
    for (auto v : b.mask) {
        EXPECT_EQ(v, 0);
    }
}

TEST(AdaptiveBinarize, BlackSquareOnWhite)
{
    GrayImage g(80, 80, 255);
    for (int y = 30; y < 50; ++y) {
        for (int x = 30; x < 50; ++x) {
            g.at(x, y) = 0;
        }
    }
    const int window = 9;
    const BinaryImage b = binarize_adaptive(g, window, 7);
    EXPECT_EQ(b, oracle::naive_binarize(g, window, 7));
    const int r = window / 2;
    for (int y = 0; y < 80; ++y) {
        for (int x = 0; x < 80; ++x) {
            const bool inside = x >= 30 && x < 50 && y >= 30 && y < 50;
            const bool deep = x >= 30 + r && x < 50 - r && y >= 30 + r && y < 50 - r;
            // White never falls below its local mean; black does wherever the
            // window still sees white. A fully black window is flat.
            EXPECT_EQ(b.at(x, y), inside && !deep) << x << "," << y;
        }
    }
}

TEST(AdaptiveBinarize, MatchesNaiveOracleOnRandomImages)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage g = fixture::random_gray(64, 64, rng);
        const int window = 3 + 2 * static_cast<int>(rng() % 15);
        const int offset = static_cast<int>(rng() % 21) - 5;
        ASSERT_EQ(binarize_adaptive(g, window, offset), oracle::naive_binarize(g, window, offset))
            << "window " << window << " offset " << offset;
    }
}

TEST(AdaptiveBinarize, WindowValidation)
{
    const GrayImage g(20, 10, 0);
    EXPECT_THROW(binarize_adaptive(g, 11, 0), WindowTooLarge);
    EXPECT_THROW(binarize_adaptive(g, 4, 0), std::invalid_argument);
    EXPECT_THROW(binarize_adaptive(g, 1, 0), std::invalid_argument);
    EXPECT_NO_THROW(binarize_adaptive(g, 9, 0));
}
