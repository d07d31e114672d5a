#include "autotag/evaluator.hpp"

#include "autotag/errors.hpp"
#include "autotag/image_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace autotag {

namespace fs = std::filesystem;

MatchResult& MatchResult::operator+=(const MatchResult& o) noexcept
{
    correct += o.correct;
    wrong_id += o.wrong_id;
    missed += o.missed;
    spurious += o.spurious;
    return *this;
}

double iou(const NormalizedBBox& a, const NormalizedBBox& b) noexcept
{
    return box_iou(a.corners(), b.corners());
}

namespace {

std::string stem_of(const std::string& name)
{
    return fs::path(name).stem().string();
}

} // namespace

MatchResult match_detections(const std::vector<Prediction>& preds,
                             const std::vector<TruthBox>& truths, double iou_min,
                             double threshold)
{
    std::map<std::string, std::vector<std::size_t>> truths_by_image;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        truths_by_image[stem_of(truths[i].image)].push_back(i);
    }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].confidence >= threshold) {
            order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].confidence > preds[b].confidence;
    });

    MatchResult m;
    std::vector<bool> taken(truths.size(), false);
    for (std::size_t pi : order) {
        const Prediction& p = preds[pi];
        const auto it = truths_by_image.find(stem_of(p.image));
        std::size_t best = truths.size();
        double best_iou = iou_min;
        if (it != truths_by_image.end()) {
            for (std::size_t ti : it->second) {
                if (taken[ti]) {
                    continue;
                }
                const double v = iou(p.bbox, truths[ti].bbox);
                if (v >= best_iou && (best == truths.size() || v > best_iou)) {
                    best = ti;
                    best_iou = v;
                }
            }
        }
        if (best == truths.size()) {
            ++m.spurious;
            continue;
        }
        taken[best] = true;
        if (truths[best].class_index == p.class_index) {
            ++m.correct;
        } else {
            ++m.wrong_id;
        }
    }
    m.missed = static_cast<long>(std::count(taken.begin(), taken.end(), false));
    return m;
}

Rates rates(const MatchResult& m)
{
    if (m.truths() <= 0) {
        throw NoTruths("recognition rate needs at least one ground-truth marker");
    }
    Rates r;
    r.recognition = static_cast<double>(m.correct) / static_cast<double>(m.truths());
    r.misidentification =
        m.kept() == 0 ? 0.0
                      : static_cast<double>(m.wrong_id + m.spurious) / static_cast<double>(m.kept());
    return r;
}

std::vector<double> default_thresholds()
{
    std::vector<double> t;
    for (int i = 0; i < 6; ++i) {
        t.push_back((3 + i) / 10.0);
    }
    return t;
}

EvalReport threshold_sweep(const std::vector<Prediction>& preds,
                           const std::vector<TruthBox>& truths,
                           const std::vector<double>& thresholds, double iou_min)
{
    if (thresholds.empty()) {
        throw std::invalid_argument("threshold list is empty");
    }
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > thresholds[i - 1])) {
            throw std::invalid_argument("thresholds must be strictly increasing");
        }
    }
    if (!(iou_min > 0.0 && iou_min <= 1.0)) {
        throw std::invalid_argument("iou_min must lie in (0, 1]");
    }
    EvalReport report;
    report.iou_min = iou_min;
    for (double t : thresholds) {
        EvalRow row;
        row.threshold = t;
        row.counts = match_detections(preds, truths, iou_min, t);
        row.rates = rates(row.counts);
        report.rows.push_back(row);
    }
    return report;
}

std::string EvalReport::to_csv() const
{
    std::string out = "threshold,recognition_rate,misidentification_rate,correct,wrong_id,missed,"
                      "spurious\n";
    char buf[160];
    for (const EvalRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.2f,%.6f,%.6f,%ld,%ld,%ld,%ld\n", r.threshold,
                      r.rates.recognition, r.rates.misidentification, r.counts.correct,
                      r.counts.wrong_id, r.counts.missed, r.counts.spurious);
        out += buf;
    }
    return out;
}

std::string EvalReport::to_json() const
{
    nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
    for (const EvalRow& r : rows) {
        rows_json.push_back({{"threshold", r.threshold},
                             {"recognition_rate", r.rates.recognition},
                             {"misidentification_rate", r.rates.misidentification},
                             {"correct", r.counts.correct},
                             {"wrong_id", r.counts.wrong_id},
                             {"missed", r.counts.missed},
                             {"spurious", r.counts.spurious}});
    }
    const nlohmann::ordered_json doc = {
        {"iou_min", iou_min}, {"dataset", dataset}, {"method", method}, {"rows", rows_json}};
    return doc.dump(2) + "\n";
}

namespace {

constexpr std::string_view kPredictionHeader = "image,class,confidence,cx,cy,w,h";

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

std::vector<Prediction> parse_predictions(const std::string& text)
{
    std::vector<Prediction> preds;
    std::size_t pos = 0;
    int line_no = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        if (!header_seen) {
            if (line != kPredictionHeader) {
                throw ParseError(line_no, "expected header '" + std::string(kPredictionHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_commas(line);
        if (f.size() != 7) {
            throw ParseError(line_no, "expected 7 fields, found " + std::to_string(f.size()));
        }
        Prediction p;
        p.image = std::string(f[0]);
        if (p.image.empty()) {
            throw ParseError(line_no, "empty image name");
        }
        if (!parse_number(f[1], p.class_index)) {
            throw ParseError(line_no, "class is not an integer");
        }
        double* values[5] = {&p.confidence, &p.bbox.cx, &p.bbox.cy, &p.bbox.w, &p.bbox.h};
        for (int i = 0; i < 5; ++i) {
            if (!parse_number(f[i + 2], *values[i])) {
                throw ParseError(line_no, "field " + std::to_string(i + 3) + " is not a number");
            }
        }
        if (p.class_index < 0) {
            throw ValidationError(line_no, "negative class index");
        }
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
            throw ValidationError(line_no, "confidence outside [0, 1]");
        }
        if (!p.bbox.valid()) {
            throw ValidationError(line_no, "box outside the unit square or empty");
        }
        preds.push_back(std::move(p));
    }
    return preds;
}

std::vector<Prediction> load_predictions(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_predictions(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(e.line(), path.string() + ": " + e.what());
    }
}

std::string format_predictions(const std::vector<Prediction>& preds)
{
    std::string out(kPredictionHeader);
    out += '\n';
    char buf[128];
    for (const Prediction& p : preds) {
        if (p.image.find_first_of(",\n") != std::string::npos) {
            throw std::invalid_argument("image name '" + p.image + "' contains a comma or newline");
        }
        std::snprintf(buf, sizeof buf, ",%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", p.class_index,
                      p.confidence, p.bbox.cx, p.bbox.cy, p.bbox.w, p.bbox.h);
        out += p.image;
        out += buf;
    }
    return out;
}

std::vector<TruthBox> load_truths(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw IoError(dir.string() + ": not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const fs::path& p = entry.path();
        if (entry.is_regular_file() && p.extension() == ".txt" && p.filename() != "classes.txt") {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<TruthBox> truths;
    for (const auto& f : files) {
        for (const AnnotationRecord& r : read_label_file(f)) {
            truths.push_back({f.stem().string(), r.class_index, r.bbox});
        }
    }
    return truths;
}

std::vector<Prediction> to_predictions(const std::string& image,
                                       const std::vector<Detection>& detections, int width,
                                       int height)
{
    std::vector<Prediction> preds;
    for (const Detection& d : detections) {
        try {
            preds.push_back({image, d.id, d.confidence, quad_to_bbox(d.corners, width, height)});
        } catch (const ZeroArea&) {
        }
    }
    return preds;
}

namespace {

std::string report_rows_csv(const EvalReport& report)
{
    std::string out;
    const std::string body = report.to_csv();
    std::size_t pos = body.find('\n') + 1;  // skip header
    while (pos < body.size()) {
        const std::size_t end = body.find('\n', pos);
        out += report.method + "," + body.substr(pos, end - pos + 1);
        pos = end + 1;
    }
    return out;
}

} // namespace

std::string comparison_csv(const std::vector<EvalReport>& reports)
{
    for (const auto& r : reports) {
        if (r.method.find_first_of(",\n") != std::string::npos) {
            throw std::invalid_argument("method tag '" + r.method + "' contains a comma");
        }
    }
    std::string out = "method,threshold,recognition_rate,misidentification_rate,correct,"
                      "wrong_id,missed,spurious\n";
    for (const auto& r : reports) {
        out += report_rows_csv(r);
    }
    return out;
}

std::string comparison_json(const std::vector<EvalReport>& reports)
{
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        all.push_back(nlohmann::ordered_json::parse(r.to_json()));
    }
    return nlohmann::ordered_json{{"reports", all}}.dump(2) + "\n";
}

void write_comparison(const std::vector<EvalReport>& reports, const fs::path& prefix)
{
    fs::path csv = prefix;
    csv += ".csv";
    fs::path json = prefix;
    json += ".json";
    write_text_atomic(csv, comparison_csv(reports));
    write_text_atomic(json, comparison_json(reports));
}

void write_report(const EvalReport& report, const fs::path& prefix)
{
    fs::path csv = prefix;
    csv += ".csv";
    fs::path json = prefix;
    json += ".json";
    write_text_atomic(csv, report.to_csv());
    write_text_atomic(json, report.to_json());
}

} // namespace autotag
