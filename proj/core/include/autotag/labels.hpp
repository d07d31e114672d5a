#pragma once

#include "autotag/geometry.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace autotag {

// Center/size box in fractions of the image width and height.
struct NormalizedBBox
{
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    Box corners() const noexcept { return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}; }
    bool valid() const noexcept;

    friend bool operator==(const NormalizedBBox&, const NormalizedBBox&) = default;
};

struct AnnotationRecord
{
    int class_index = 0;
    NormalizedBBox bbox;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Axis-aligned hull of the corners, clamped to the image and normalized.
/// Throws ZeroArea when the clamped width or height would print as 0.000000.
NormalizedBBox quad_to_bbox(const Quad& quad, int image_width, int image_height);

/// "C CX CY W H" with %.6f fractions, LF terminated.
std::string format_label_line(const AnnotationRecord& rec);
std::string format_labels(const std::vector<AnnotationRecord>& records);

/// Throws ParseError / ValidationError with 1-based line numbers.
std::vector<AnnotationRecord> parse_labels(std::string_view text);
std::vector<AnnotationRecord> read_label_file(const std::filesystem::path& path);

} // namespace autotag
