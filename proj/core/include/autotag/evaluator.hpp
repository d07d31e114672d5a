#pragma once

#include "autotag/detector.hpp"
#include "autotag/labels.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace autotag {

struct Prediction
{
    std::string image;
    int class_index = 0;
    double confidence = 0.0;
    NormalizedBBox bbox;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct TruthBox
{
    std::string image;
    int class_index = 0;
    NormalizedBBox bbox;
};

struct MatchResult
{
    long correct = 0;
    long wrong_id = 0;
    long missed = 0;
    long spurious = 0;

    long truths() const noexcept { return correct + wrong_id + missed; }
    long kept() const noexcept { return correct + wrong_id + spurious; }

    MatchResult& operator+=(const MatchResult& o) noexcept;
    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

double iou(const NormalizedBBox& a, const NormalizedBBox& b) noexcept;

/// Drops predictions below `threshold`, then greedily, in descending
/// confidence, lets each prediction claim the unmatched truth of the same
/// image with the highest IoU >= iou_min. Image names compare by stem.
MatchResult match_detections(const std::vector<Prediction>& preds,
                             const std::vector<TruthBox>& truths, double iou_min,
                             double threshold);

struct Rates
{
    double recognition = 0.0;
    double misidentification = 0.0;
};

/// recognition = correct / truths; misidentification = (wrong_id + spurious)
/// / kept, 0 when nothing was kept. Throws NoTruths.
Rates rates(const MatchResult& m);

struct EvalRow
{
    double threshold = 0.0;
    Rates rates;
    MatchResult counts;
};

struct EvalReport
{
    double iou_min = 0.5;
    std::string dataset;
    std::string method;
    std::vector<EvalRow> rows;

    /// header "threshold,recognition_rate,misidentification_rate,correct,wrong_id,missed,spurious"
    std::string to_csv() const;
    std::string to_json() const;
};

/// {0.3, 0.4, ..., 0.8}
std::vector<double> default_thresholds();

/// Thresholds must be non-empty and strictly increasing.
EvalReport threshold_sweep(const std::vector<Prediction>& preds,
                           const std::vector<TruthBox>& truths,
                           const std::vector<double>& thresholds, double iou_min);

/// CSV with header "image,class,confidence,cx,cy,w,h". Throws ParseError /
/// ValidationError carrying the 1-based line number.
std::vector<Prediction> parse_predictions(const std::string& text);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::string format_predictions(const std::vector<Prediction>& preds);

/// Every *.txt label file under `dir` except classes.txt; image = file stem.
std::vector<TruthBox> load_truths(const std::filesystem::path& dir);

/// Class index = marker id, confidence = the decoder's confidence. Detections
/// whose box collapses after clamping are dropped.
std::vector<Prediction> to_predictions(const std::string& image,
                                       const std::vector<Detection>& detections, int width,
                                       int height);

/// Several sweeps side by side: the per-report CSV with a leading "method"
/// column, and a JSON object holding every report.
std::string comparison_csv(const std::vector<EvalReport>& reports);
std::string comparison_json(const std::vector<EvalReport>& reports);

/// Writes <prefix>.csv and <prefix>.json atomically.
void write_report(const EvalReport& report, const std::filesystem::path& prefix);
void write_comparison(const std::vector<EvalReport>& reports, const std::filesystem::path& prefix);

} // namespace autotag
