#pragma once

#include <array>

namespace autotag {

struct Point2d
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2d&, const Point2d&) = default;
};

// Four corners in continuous image coordinates (y grows downward), clockwise
// on screen.
struct Quad
{
    std::array<Point2d, 4> corners{};

    friend bool operator==(const Quad&, const Quad&) = default;
};

// Shoelace area; positive when the vertices run clockwise on screen.
double signed_area(const Quad& q);
bool is_convex(const Quad& q);
double min_side_length(const Quad& q);

// Rotates the corner list so that corners[0] becomes old corners[k % 4].
Quad rotate_corners(const Quad& q, int k);

// Same corners, guaranteed clockwise-on-screen orientation.
Quad make_clockwise(const Quad& q);

struct Box
{
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    double area() const noexcept
    {
        return width() > 0 && height() > 0 ? width() * height() : 0.0;
    }
};

Box bounding_box(const Quad& q);
double box_iou(const Box& a, const Box& b);

} // namespace autotag
