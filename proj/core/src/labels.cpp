#include "autotag/labels.hpp"

#include "autotag/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace autotag {

namespace {

constexpr double kEdgeSlack = 1e-6;

// Smallest extent that still prints as non-zero with six decimals.
constexpr double kMinPrintable = 0.5e-6;

} // namespace

bool NormalizedBBox::valid() const noexcept
{
    const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    return unit(cx) && unit(cy) && unit(w) && unit(h) && w > 0 && h > 0 &&
           cx - w / 2 >= -kEdgeSlack && cx + w / 2 <= 1 + kEdgeSlack &&
           cy - h / 2 >= -kEdgeSlack && cy + h / 2 <= 1 + kEdgeSlack;
}

NormalizedBBox quad_to_bbox(const Quad& quad, int image_width, int image_height)
{
    if (image_width <= 0 || image_height <= 0) {
        throw std::invalid_argument("image dimensions must be positive");
    }
    const Box hull = bounding_box(quad);
    const double x0 = std::clamp(hull.x0, 0.0, static_cast<double>(image_width));
    const double x1 = std::clamp(hull.x1, 0.0, static_cast<double>(image_width));
    const double y0 = std::clamp(hull.y0, 0.0, static_cast<double>(image_height));
    const double y1 = std::clamp(hull.y1, 0.0, static_cast<double>(image_height));
    NormalizedBBox b;
    b.w = (x1 - x0) / image_width;
    b.h = (y1 - y0) / image_height;
    if (!(b.w >= kMinPrintable && b.h >= kMinPrintable)) {
        throw ZeroArea("bounding box collapses after clamping");
    }
    b.cx = (x0 + x1) / 2 / image_width;
    b.cy = (y0 + y1) / 2 / image_height;
    return b;
}

std::string format_label_line(const AnnotationRecord& rec)
{
    char buf[96];
    const int n = std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", rec.class_index,
                                rec.bbox.cx, rec.bbox.cy, rec.bbox.w, rec.bbox.h);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_labels(const std::vector<AnnotationRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += format_label_line(r);
    }
    return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::vector<AnnotationRecord> parse_labels(std::string_view text)
{
    std::vector<AnnotationRecord> records;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 5) {
            throw ParseError(line_no, "expected 5 fields, found " + std::to_string(tokens.size()));
        }
        AnnotationRecord rec;
        if (!parse_number(tokens[0], rec.class_index)) {
            throw ParseError(line_no, "class is not an integer");
        }
        double* fields[4] = {&rec.bbox.cx, &rec.bbox.cy, &rec.bbox.w, &rec.bbox.h};
        for (int i = 0; i < 4; ++i) {
            if (!parse_number(tokens[i + 1], *fields[i])) {
                throw ParseError(line_no, "field " + std::to_string(i + 2) + " is not a number");
            }
        }
        if (rec.class_index < 0) {
            throw ValidationError(line_no, "negative class index");
        }
        if (!rec.bbox.valid()) {
            throw ValidationError(line_no, "box outside the unit square or empty");
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<AnnotationRecord> read_label_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_labels(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(e.line(), path.string() + ": " + e.what());
    }
}

} // namespace autotag
