#pragma once

#include "autotag/detect_params.hpp"
#include "autotag/geometry.hpp"
#include "autotag/image.hpp"

#include <vector>

namespace autotag {

struct Pixel
{
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Outer border of every 8-connected foreground component, traced with
/// Moore-neighbour following from the component's first raster pixel.
/// Components whose bounding box is smaller than `min_bbox_area` pixels are
/// skipped without tracing.
std::vector<std::vector<Pixel>> trace_outer_contours(const BinaryImage& binary,
                                                     long min_bbox_area = 0);

/// Douglas-Peucker on a closed polyline. The seed split uses the two mutually
/// farthest points so the result does not depend on where the contour starts.
std::vector<Point2d> simplify_closed(const std::vector<Point2d>& contour, double epsilon);

double closed_perimeter(const std::vector<Point2d>& contour);

/// Convex four-vertex simplifications of the outer contours, corners ordered
/// clockwise on screen. Corners sit on the pixel-edge boundary of the region
/// (contour pixel centers pushed half a pixel outward).
std::vector<Quad> extract_quad_candidates(const BinaryImage& binary, const DetectParams& params);

} // namespace autotag
