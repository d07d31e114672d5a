#include "autotag/contour.hpp"
#include "autotag/detector.hpp"
#include "autotag/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>
#include <set>

using namespace autotag;

namespace {

BinaryImage filled_rect(int w, int h, int x0, int y0, int x1, int y1)
{
    BinaryImage b(w, h);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            b.set(x, y, true);
        }
    }
    return b;
}

// Foreground pixels 4-adjacent to background reachable from outside the image.
std::set<std::pair<int, int>> outer_border_pixels(const BinaryImage& b)
{
    const int w = b.width + 2;
    const int h = b.height + 2;
    const auto fg = [&](int x, int y) {
        return x >= 1 && y >= 1 && x <= b.width && y <= b.height && b.at(x - 1, y - 1);
    };
    std::vector<char> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> stack{{0, 0}};
    outside[0] = 1;
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int i = 0; i < 4; ++i) {
            const int nx = x + dx[i];
            const int ny = y + dy[i];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || fg(nx, ny) || outside[ny * w + nx]) {
                continue;
            }
            outside[ny * w + nx] = 1;
            stack.emplace_back(nx, ny);
        }
    }
    std::set<std::pair<int, int>> border;
    for (int y = 1; y <= b.height; ++y) {
        for (int x = 1; x <= b.width; ++x) {
            if (!fg(x, y)) {
                continue;
            }
            if (outside[y * w + x - 1] || outside[y * w + x + 1] || outside[(y - 1) * w + x] ||
                outside[(y + 1) * w + x]) {
                border.emplace(x - 1, y - 1);
            }
        }
    }
    return border;
}

double corner_error(const Quad& a, const Quad& b)
{
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        worst = std::max(worst, std::hypot(a.corners[i].x - b.corners[i].x,
                                           a.corners[i].y - b.corners[i].y));
    }
    return worst;
}

Quad axis_square(double x0, double y0, double side)
{
    return Quad{{Point2d{x0, y0}, Point2d{x0 + side, y0}, Point2d{x0 + side, y0 + side},
                 Point2d{x0, y0 + side}}};
}

// Clockwise quarter turn of the whole image: (x, y) -> (H - 1 - y, x).
GrayImage turn_clockwise(const GrayImage& g)
{
    GrayImage out(g.height, g.width);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            out.at(g.height - 1 - y, x) = g.at(x, y);
        }
    }
    return out;
}

} // namespace

TEST(Contour, RectangleBorderIsTracedOnce)
{
    const BinaryImage b = filled_rect(40, 30, 10, 5, 30, 25);
    const auto contours = trace_outer_contours(b);
    ASSERT_EQ(contours.size(), 1u);
    EXPECT_EQ(contours[0].size(), static_cast<std::size_t>(2 * (20 + 20) - 4));
    EXPECT_EQ(contours[0].front(), (Pixel{10, 5}));
}

TEST(Contour, MatchesOuterBorderOracleOnRandomBlobs)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        // One blob: a union of random rectangles grown from a common seed.
        BinaryImage b(40, 40);
        const int seeds = 1 + static_cast<int>(rng() % 6);
        for (int s = 0; s < seeds; ++s) {
            const int x0 = 12 + static_cast<int>(rng() % 8);
            const int y0 = 12 + static_cast<int>(rng() % 8);
            const int x1 = x0 + 1 + static_cast<int>(rng() % 14);
            const int y1 = y0 + 1 + static_cast<int>(rng() % 14);
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    b.set(x, y, true);
                }
            }
        }
        // Sprinkle holes and spurs that keep the blob 8-connected.
        for (int k = 0; k < 30; ++k) {
            const int x = 10 + static_cast<int>(rng() % 24);
            const int y = 10 + static_cast<int>(rng() % 24);
            if (b.at(x, y) && b.at(x + 1, y) && b.at(x - 1, y) && b.at(x, y + 1) && b.at(x, y - 1)) {
                b.set(x, y, false);
            }
        }
        for (int y = 12; y <= 19; ++y) {
            for (int x = 12; x <= 19; ++x) {
                b.set(x, y, true);
            }
        }
        const auto contours = trace_outer_contours(b);
        ASSERT_EQ(contours.size(), 1u) << "trial " << trial;
        const std::set<std::pair<int, int>> traced = [&] {
            std::set<std::pair<int, int>> s;
            for (const Pixel& p : contours[0]) {
                s.emplace(p.x, p.y);
            }
            return s;
        }();
        ASSERT_EQ(traced, outer_border_pixels(b)) << "trial " << trial;
        for (std::size_t i = 0; i < contours[0].size(); ++i) {
            const Pixel a = contours[0][i];
            const Pixel c = contours[0][(i + 1) % contours[0].size()];
            ASSERT_LE(std::max(std::abs(a.x - c.x), std::abs(a.y - c.y)), 1);
        }
    }
}

TEST(Contour, SmallComponentsAreSkipped)
{
    BinaryImage b = filled_rect(30, 30, 2, 2, 4, 4);
    for (int y = 10; y < 20; ++y) {
        for (int x = 10; x < 20; ++x) {
            b.set(x, y, true);
        }
    }
    EXPECT_EQ(trace_outer_contours(b).size(), 2u);
    EXPECT_EQ(trace_outer_contours(b, 5).size(), 1u);
}

TEST(Contour, SimplifyIsStartIndependent)
{
    std::vector<Point2d> ring;
    for (int i = 0; i < 20; ++i) ring.push_back({static_cast<double>(i), 0});
    for (int i = 0; i < 20; ++i) ring.push_back({20, static_cast<double>(i)});
    for (int i = 0; i < 20; ++i) ring.push_back({20.0 - i, 20});
    for (int i = 0; i < 20; ++i) ring.push_back({0, 20.0 - i});
    EXPECT_DOUBLE_EQ(closed_perimeter(ring), 80.0);
    const auto base = simplify_closed(ring, 1.0);
    ASSERT_EQ(base.size(), 4u);
    for (int shift = 1; shift < 80; shift += 7) {
        std::vector<Point2d> rotated(ring.begin() + shift, ring.end());
        rotated.insert(rotated.end(), ring.begin(), ring.begin() + shift);
        const auto s = simplify_closed(rotated, 1.0);
        using Corners = std::set<std::pair<double, double>>;
        ASSERT_EQ(s.size(), 4u);
        const Corners got{{s[0].x, s[0].y}, {s[1].x, s[1].y}, {s[2].x, s[2].y}, {s[3].x, s[3].y}};
        const Corners want{{0, 0}, {20, 0}, {20, 20}, {0, 20}};
        ASSERT_EQ(got, want) << "shift " << shift;
    }
}

TEST(Contour, QuadCornersSitOnPixelEdges)
{
    const BinaryImage b = filled_rect(64, 48, 10, 5, 30, 25);
    DetectParams params;
    const auto quads = extract_quad_candidates(b, params);
    ASSERT_EQ(quads.size(), 1u);
    EXPECT_GT(signed_area(quads[0]), 0.0);
    std::set<std::pair<double, double>> corners;
    for (const auto& c : quads[0].corners) {
        corners.emplace(std::round(c.x * 1e9) / 1e9, std::round(c.y * 1e9) / 1e9);
    }
    EXPECT_EQ(corners, (std::set<std::pair<double, double>>{{10, 5}, {30, 5}, {30, 25}, {10, 25}}));
}

TEST(Contour, AreaFiltersApply)
{
    const BinaryImage b = filled_rect(100, 100, 10, 10, 20, 20);
    DetectParams params;
    params.min_area = 0.02;
    EXPECT_TRUE(extract_quad_candidates(b, params).empty());
    params.min_area = 0.005;
    params.max_area = 0.009;
    EXPECT_TRUE(extract_quad_candidates(b, params).empty());
    params.max_area = 0.011;
    EXPECT_EQ(extract_quad_candidates(b, params).size(), 1u);
}

TEST(DetectParams, Validation)
{
    DetectParams p;
    EXPECT_NO_THROW(p.validate());
    p.window = 4;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.min_area = 0.5;
    p.max_area = 0.4;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.cell_margin = 0.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Detector, CleanMarkerCornersWithinOnePixel)
{
    const auto& d = fixture::standard_dictionary();
    for (int id : {0, 7, 27}) {
        const GrayImage canvas = fixture::paste(render_marker(d, id, 10, 1), 200, 160, 37, 29);
        const auto dets = detect_markers(canvas, d);
        ASSERT_EQ(dets.size(), 1u) << "id " << id;
        EXPECT_EQ(dets[0].id, id);
        EXPECT_EQ(dets[0].corrected_bits, 0);
        EXPECT_DOUBLE_EQ(dets[0].confidence, 1.0);
        EXPECT_LE(corner_error(dets[0].corners, axis_square(47, 39, 70)), 1.5);
    }
}

TEST(Detector, BlankAndNonMarkerImagesYieldNothing)
{
    const auto& d = fixture::standard_dictionary();
    EXPECT_TRUE(detect_markers(GrayImage(120, 90, 255), d).empty());
    EXPECT_TRUE(detect_markers(GrayImage(120, 90, 0), d).empty());
    GrayImage disk(120, 120, 255);
    for (int y = 0; y < 120; ++y) {
        for (int x = 0; x < 120; ++x) {
            if (std::hypot(x - 60, y - 60) < 35) {
                disk.at(x, y) = 0;
            }
        }
    }
    EXPECT_TRUE(detect_markers(disk, d).empty());
    // Solid black square: all-black payload is not a codeword within capacity.
    GrayImage square(120, 120, 255);
    for (int y = 30; y < 90; ++y) {
        for (int x = 30; x < 90; ++x) {
            square.at(x, y) = 0;
        }
    }
    EXPECT_TRUE(detect_markers(square, d).empty());
}

TEST(Detector, QuarterTurnKeepsIdAndTopLeftCorner)
{
    const auto& d = fixture::standard_dictionary();
    const GrayImage canvas = fixture::paste(render_marker(d, 11, 10, 1), 200, 160, 37, 29);
    GrayImage img = canvas;
    Quad expected = axis_square(47, 39, 70);
    for (int turn = 0; turn < 4; ++turn) {
        const auto dets = detect_markers(img, d);
        ASSERT_EQ(dets.size(), 1u) << "turn " << turn;
        EXPECT_EQ(dets[0].id, 11);
        EXPECT_LE(corner_error(dets[0].corners, expected), 1.5) << "turn " << turn;
        // Continuous (x, y) -> (H - y, x) under the image turn.
        for (auto& c : expected.corners) {
            c = Point2d{img.height - c.y, c.x};
        }
        img = turn_clockwise(img);
    }
}

TEST(Detector, SeveralMarkersSortedByPosition)
{
    const auto& d = fixture::standard_dictionary();
    RgbImage bg = solid_background(400, 300, 200);
    std::vector<Placement> placements;
    placements.push_back(Placement{3, 60, {300, 70}, 0.0, 0.0, 0.3});
    placements.push_back(Placement{9, 60, {90, 80}, 0.2, 1.0, -0.5});
    placements.push_back(Placement{21, 70, {200, 210}, 0.0, 0.0, 2.0});
    const Scene scene = compose_scene(bg, placements, d);
    const auto dets = detect_markers(scene.image, d);
    ASSERT_EQ(dets.size(), 3u);
    EXPECT_EQ(dets[0].id, 3);
    EXPECT_EQ(dets[1].id, 9);
    EXPECT_EQ(dets[2].id, 21);
    for (const auto& det : dets) {
        EXPECT_GE(det.confidence, 0.0);
        EXPECT_LE(det.confidence, 1.0);
        EXPECT_GT(signed_area(det.corners), 0.0);
        const auto& truth = *std::find_if(scene.truths.begin(), scene.truths.end(),
                                          [&](const GroundTruth& t) { return t.id == det.id; });
        EXPECT_LE(corner_error(det.corners, truth.quad), 2.0) << "id " << det.id;
    }
}

TEST(Detector, DeterministicAcrossCalls)
{
    const auto& d = fixture::standard_dictionary();
    Rng rng(5);
    const RgbImage bg = noise_background(320, 240, rng);
    const Scene scene = compose_scene(bg, {Placement{14, 80, {160, 120}, 0.4, 0.7, 1.1}}, d);
    const auto a = detect_markers(scene.image, d);
    const auto b = detect_markers(scene.image, d);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].id, b[i].id);
        EXPECT_EQ(a[i].corners, b[i].corners);
    }
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].id, 14);
}

TEST(Detector, JsonLine)
{
    Detection det;
    det.id = 4;
    det.confidence = 0.75;
    det.corrected_bits = 1;
    det.corners = axis_square(1, 2, 3);
    const std::string line = detection_to_json_line("img_0", det);
    ASSERT_FALSE(line.empty());
    EXPECT_EQ(line.back(), '\n');
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("image"), "img_0");
    EXPECT_EQ(j.at("id"), 4);
    EXPECT_EQ(j.at("corrected_bits"), 1);
    EXPECT_DOUBLE_EQ(j.at("confidence").get<double>(), 0.75);
    EXPECT_DOUBLE_EQ(j.at("corners")[2][0].get<double>(), 4.0);
}
