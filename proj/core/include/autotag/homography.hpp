#pragma once

#include "autotag/geometry.hpp"
#include "autotag/image.hpp"

#include <array>

namespace autotag {

// 3x3 projective map, row-major, normalized so m[8] == 1.
struct Homography
{
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const noexcept { return m[r * 3 + c]; }
    Point2d apply(const Point2d& p) const noexcept;
    double determinant() const noexcept;

    // Throws SingularHomography when |det| <= 1e-12.
    Homography inverse() const;

    static Homography identity() { return {}; }
};

/// Solves the 8-unknown linear system that sends the quad corners, in order,
/// to (0,0), (side,0), (side,side), (0,side). Throws DegenerateQuad when three
/// corners are collinear or the system is singular.
Homography homography_from_quad(const Quad& quad, double side);

/// General 4-point correspondence solve (same system, arbitrary targets).
Homography homography_from_points(const std::array<Point2d, 4>& src,
                                  const std::array<Point2d, 4>& dst);

/// side x side canonical image; output pixel (u, v) takes the bilinear sample
/// of `gray` at H^-1 (u + 0.5, v + 0.5), clamped to the nearest edge pixel.
GrayImage rectify(const GrayImage& gray, const Homography& h, int side);

} // namespace autotag
