#include "autotag/errors.hpp"
#include "autotag/evaluator.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <random>

using namespace autotag;

namespace {

NormalizedBBox grid_box(int i)
{
    return {0.1 + 0.2 * (i % 5), 0.25 + 0.5 * (i / 5), 0.08, 0.08};
}

// Ten truths; eight predicted exactly, one with the wrong class, one missed,
// plus two predictions over empty background.
struct HandFixture
{
    std::vector<TruthBox> truths;
    std::vector<Prediction> preds;

    HandFixture()
    {
        for (int i = 0; i < 10; ++i) {
            truths.push_back({"img", i, grid_box(i)});
        }
        for (int i = 0; i < 8; ++i) {
            preds.push_back({"img", i, 0.9 - 0.01 * i, grid_box(i)});
        }
        preds.push_back({"img", 20, 0.85, grid_box(8)});
        preds.push_back({"img", 3, 0.6, {0.2, 0.5, 0.05, 0.05}});
        preds.push_back({"img", 4, 0.4, {0.9, 0.5, 0.05, 0.05}});
    }
};

std::vector<Prediction> random_predictions(std::mt19937_64& rng, const std::vector<TruthBox>& truths,
                                           int extra)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Prediction> preds;
    for (const auto& t : truths) {
        if (u(rng) < 0.8) {
            NormalizedBBox b = t.bbox;
            b.cx += (u(rng) - 0.5) * 0.03;
            b.cy += (u(rng) - 0.5) * 0.03;
            const int cls = u(rng) < 0.85 ? t.class_index : static_cast<int>(rng() % 28);
            preds.push_back({t.image, cls, std::round(u(rng) * 100) / 100, b});
        }
    }
    for (int i = 0; i < extra; ++i) {
        const NormalizedBBox& near = truths[rng() % truths.size()].bbox;
        NormalizedBBox b{near.cx + (u(rng) - 0.5) * 0.06, near.cy + (u(rng) - 0.5) * 0.06, 0.08, 0.08};
        preds.push_back({truths[rng() % truths.size()].image, static_cast<int>(rng() % 28),
                         std::round(u(rng) * 100) / 100, b});
    }
    return preds;
}

std::vector<TruthBox> random_truths(std::mt19937_64& rng, int images, int per_image)
{
    std::vector<TruthBox> truths;
    for (int im = 0; im < images; ++im) {
        for (int i = 0; i < per_image; ++i) {
            truths.push_back({"im" + std::to_string(im), static_cast<int>(rng() % 28), grid_box(i)});
        }
    }
    return truths;
}

} // namespace

TEST(Iou, Examples)
{
    const NormalizedBBox a{0.2, 0.2, 0.2, 0.2};
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    EXPECT_DOUBLE_EQ(iou(a, {0.8, 0.8, 0.2, 0.2}), 0.0);
    EXPECT_NEAR(iou({0.2, 0.2, 0.2, 0.2}, {0.3, 0.2, 0.2, 0.2}), 1.0 / 3.0, 1e-12);
}

TEST(Iou, SymmetricAndBounded)
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.05, 0.3);
    for (int i = 0; i < 1000; ++i) {
        const NormalizedBBox a{0.5 + u(rng) - 0.17, 0.5 + u(rng) - 0.17, u(rng), u(rng)};
        const NormalizedBBox b{0.5 + u(rng) - 0.17, 0.5 + u(rng) - 0.17, u(rng), u(rng)};
        EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
        EXPECT_GE(iou(a, b), 0.0);
        EXPECT_LE(iou(a, b), 1.0);
    }
}

TEST(Match, PerfectAndEmptyPredictors)
{
    const HandFixture f;
    std::vector<Prediction> perfect;
    for (const auto& t : f.truths) {
        perfect.push_back({t.image, t.class_index, 1.0, t.bbox});
    }
    EXPECT_EQ(match_detections(perfect, f.truths, 0.5, 0.3), (MatchResult{10, 0, 0, 0}));
    EXPECT_EQ(match_detections({}, f.truths, 0.5, 0.3), (MatchResult{0, 0, 10, 0}));
}

TEST(Match, HandFixtureAgreesWithOptimalAssignment)
{
    const HandFixture f;
    const MatchResult m = match_detections(f.preds, f.truths, 0.5, 0.0);
    EXPECT_EQ(m, (MatchResult{8, 1, 1, 2}));
    EXPECT_EQ(m.correct, oracle::best_correct_assignment(f.preds, f.truths, 0.5));
}

TEST(Match, ImagesCompareByStem)
{
    const std::vector<TruthBox> truths{{"a.png", 1, grid_box(0)}};
    const std::vector<Prediction> preds{{"a", 1, 0.5, grid_box(0)}};
    EXPECT_EQ(match_detections(preds, truths, 0.5, 0.3).correct, 1);
    const std::vector<Prediction> elsewhere{{"b", 1, 0.5, grid_box(0)}};
    EXPECT_EQ(match_detections(elsewhere, truths, 0.5, 0.3), (MatchResult{0, 0, 1, 1}));
}

TEST(Match, HigherConfidenceClaimsFirst)
{
    const std::vector<TruthBox> truths{{"x", 1, grid_box(0)}};
    const std::vector<Prediction> preds{{"x", 2, 0.9, grid_box(0)}, {"x", 1, 0.5, grid_box(0)}};
    EXPECT_EQ(match_detections(preds, truths, 0.5, 0.3), (MatchResult{0, 1, 0, 1}));
    EXPECT_EQ(match_detections(preds, truths, 0.5, 0.95), (MatchResult{0, 0, 1, 0}));
}

TEST(Match, CountInvariantsAndOptimalityBound)
{
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 200; ++trial) {
        const auto truths = random_truths(rng, 2, 3);
        const auto preds = random_predictions(rng, truths, 3);
        const double thr = (rng() % 10) / 10.0;
        const MatchResult m = match_detections(preds, truths, 0.5, thr);
        std::vector<Prediction> kept;
        for (const auto& p : preds) {
            if (p.confidence >= thr) {
                kept.push_back(p);
            }
        }
        ASSERT_EQ(m.truths(), static_cast<long>(truths.size()));
        ASSERT_EQ(m.kept(), static_cast<long>(kept.size()));
        ASSERT_LE(m.correct, oracle::best_correct_assignment(kept, truths, 0.5));
    }
}

TEST(Rates, HandComputedFixture)
{
    const Rates r = rates({8, 1, 1, 2});
    EXPECT_NEAR(r.recognition, 0.8, 1e-12);
    EXPECT_NEAR(r.misidentification, 3.0 / 11.0, 1e-12);
    const Rates perfect = rates({5, 0, 0, 0});
    EXPECT_DOUBLE_EQ(perfect.recognition, 1.0);
    EXPECT_DOUBLE_EQ(perfect.misidentification, 0.0);
    const Rates none = rates({0, 0, 4, 0});
    EXPECT_DOUBLE_EQ(none.recognition, 0.0);
    EXPECT_DOUBLE_EQ(none.misidentification, 0.0);
    EXPECT_THROW(rates({0, 0, 0, 3}), NoTruths);
}

TEST(Sweep, SixRowsWithMonotoneCounts)
{
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        const auto truths = random_truths(rng, 4, 6);
        const auto preds = random_predictions(rng, truths, 8);
        const EvalReport rep = threshold_sweep(preds, truths, default_thresholds(), 0.5);
        ASSERT_EQ(rep.rows.size(), 6u);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            EXPECT_NEAR(rep.rows[i].threshold, 0.3 + 0.1 * i, 1e-12);
            EXPECT_GE(rep.rows[i].rates.recognition, 0.0);
            EXPECT_LE(rep.rows[i].rates.misidentification, 1.0);
            if (i > 0) {
                const auto& a = rep.rows[i - 1].counts;
                const auto& b = rep.rows[i].counts;
                ASSERT_LE(b.correct, a.correct);
                ASSERT_LE(b.wrong_id + b.spurious, a.wrong_id + a.spurious);
                ASSERT_LE(b.kept(), a.kept());
            }
        }
    }
}

TEST(Sweep, InertThresholdGivesIdenticalRows)
{
    const HandFixture f;
    std::vector<Prediction> preds = f.preds;
    for (auto& p : preds) {
        p.confidence = 1.0;
    }
    const EvalReport rep = threshold_sweep(preds, f.truths, default_thresholds(), 0.5);
    for (const auto& row : rep.rows) {
        EXPECT_EQ(row.counts, rep.rows[0].counts);
    }
}

TEST(Sweep, CsvAndJsonOutput)
{
    const HandFixture f;
    EvalReport rep = threshold_sweep(f.preds, f.truths, {0.0, 0.5}, 0.5);
    rep.dataset = "fixture";
    rep.method = "hand";
    const std::string csv = rep.to_csv();
    EXPECT_EQ(csv,
              "threshold,recognition_rate,misidentification_rate,correct,wrong_id,missed,spurious\n"
              "0.00,0.800000,0.272727,8,1,1,2\n"
              "0.50,0.800000,0.200000,8,1,1,1\n");
    const auto j = nlohmann::json::parse(rep.to_json());
    EXPECT_EQ(j.at("dataset"), "fixture");
    EXPECT_EQ(j.at("rows").size(), 2u);
    const std::string both = comparison_csv({rep, rep});
    EXPECT_EQ(both.substr(0, both.find('\n')),
              "method,threshold,recognition_rate,misidentification_rate,correct,wrong_id,missed,spurious");
    EXPECT_EQ(std::count(both.begin(), both.end(), '\n'), 5);
    EXPECT_EQ(nlohmann::json::parse(comparison_json({rep})).at("reports").size(), 1u);
}

TEST(Sweep, RejectsBadThresholds)
{
    const HandFixture f;
    EXPECT_THROW(threshold_sweep(f.preds, f.truths, {}, 0.5), std::invalid_argument);
    EXPECT_THROW(threshold_sweep(f.preds, f.truths, {0.5, 0.5}, 0.5), std::invalid_argument);
    EXPECT_THROW(threshold_sweep(f.preds, f.truths, {0.5}, 0.0), std::invalid_argument);
}

TEST(PredictionCsv, WellFormedFile)
{
    const auto p = parse_predictions(
        "image,class,confidence,cx,cy,w,h\n"
        "a,1,0.5,0.5,0.5,0.1,0.1\n"
        "\n"
        "b,2,1,0.2,0.2,0.1,0.1\r\n"
        "c,0,0,0.9,0.9,0.2,0.2\n");
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[1].image, "b");
    EXPECT_DOUBLE_EQ(p[1].confidence, 1.0);
    EXPECT_TRUE(parse_predictions("").empty());
    EXPECT_TRUE(parse_predictions("image,class,confidence,cx,cy,w,h\n").empty());
}

TEST(PredictionCsv, ErrorsCarryLineNumbers)
{
    const std::string head = "image,class,confidence,cx,cy,w,h\n";
    const auto line_of = [](const std::string& text) {
        try {
            parse_predictions(text);
        } catch (const ParseError& e) {
            return e.line();
        } catch (const ValidationError& e) {
            return -e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("a,1,0.5,0.5,0.5,0.1,0.1\n"), 1);
    EXPECT_EQ(line_of(head + "a,1,0.5,0.5,0.5,0.1\n"), 2);
    EXPECT_EQ(line_of(head + "a,x,0.5,0.5,0.5,0.1,0.1\n"), 2);
    EXPECT_EQ(line_of(head + "a,1,0.5,0.5,0.5,0.1,0.1\nb,1,1.2,0.5,0.5,0.1,0.1\n"), -3);
    EXPECT_EQ(line_of(head + "a,-1,0.5,0.5,0.5,0.1,0.1\n"), -2);
    EXPECT_EQ(line_of(head + "a,1,0.5,0.99,0.5,0.1,0.1\n"), -2);
    EXPECT_EQ(line_of(head + ",1,0.5,0.5,0.5,0.1,0.1\n"), 2);
}

TEST(PredictionCsv, RoundTripIsByteStable)
{
    std::mt19937_64 rng(64);
    const auto truths = random_truths(rng, 10, 5);
    std::vector<Prediction> preds = random_predictions(rng, truths, 20);
    const std::string once = format_predictions(preds);
    const auto parsed = parse_predictions(once);
    ASSERT_EQ(parsed.size(), preds.size());
    EXPECT_EQ(format_predictions(parsed), once);
    EXPECT_THROW(format_predictions({{"a,b", 0, 0.5, grid_box(0)}}), std::invalid_argument);
}

TEST(Loading, TruthsAndPredictionsFromDisk)
{
    fixture::TempDir dir;
    std::ofstream(dir.path() / "one.txt") << "3 0.5 0.5 0.2 0.2\n";
    std::ofstream(dir.path() / "two.txt") << "";
    std::ofstream(dir.path() / "classes.txt") << "marker_0\n";
    const auto truths = load_truths(dir.path());
    ASSERT_EQ(truths.size(), 1u);
    EXPECT_EQ(truths[0].image, "one");
    EXPECT_EQ(truths[0].class_index, 3);
    EXPECT_THROW(load_truths(dir.path() / "missing"), IoError);
    std::ofstream(dir.path() / "p.csv") << "image,class,confidence,cx,cy,w,h\none,3,0.9,0.5,0.5,0.2,0.2\n";
    const auto preds = load_predictions(dir.path() / "p.csv");
    EXPECT_EQ(match_detections(preds, truths, 0.5, 0.3).correct, 1);
    EXPECT_THROW(load_predictions(dir.path() / "none.csv"), IoError);
}

TEST(Loading, DetectionsBecomePredictions)
{
    Detection inside;
    inside.id = 5;
    inside.confidence = 0.75;
    inside.corners = Quad{{Point2d{10, 10}, Point2d{30, 10}, Point2d{30, 30}, Point2d{10, 30}}};
    Detection outside = inside;
    outside.corners = Quad{{Point2d{110, 10}, Point2d{130, 10}, Point2d{130, 30}, Point2d{110, 30}}};
    const auto preds = to_predictions("im", {inside, outside}, 100, 100);
    ASSERT_EQ(preds.size(), 1u);
    EXPECT_EQ(preds[0].class_index, 5);
    EXPECT_DOUBLE_EQ(preds[0].bbox.cx, 0.2);
}

TEST(Reports, WrittenAtomically)
{
    fixture::TempDir dir;
    const HandFixture f;
    const EvalReport rep = threshold_sweep(f.preds, f.truths, default_thresholds(), 0.5);
    write_report(rep, dir.path() / "eval");
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "eval.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "eval.json"));
    write_comparison({rep}, dir.path() / "cmp");
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "cmp.csv"));
}
