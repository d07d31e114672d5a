#include "autotag/homography.hpp"

#include "autotag/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace autotag {

Point2d Homography::apply(const Point2d& p) const noexcept
{
    const double w = m[6] * p.x + m[7] * p.y + m[8];
    return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

double Homography::determinant() const noexcept
{
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const
{
    const double det = determinant();
    if (!(std::abs(det) > 1e-12)) {
        throw SingularHomography("homography determinant " + std::to_string(det));
    }
    Homography inv;
    inv.m = {
        (m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det,
        (m[1] * m[5] - m[2] * m[4]) / det, (m[5] * m[6] - m[3] * m[8]) / det,
        (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
        (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det,
        (m[0] * m[4] - m[1] * m[3]) / det,
    };
    if (std::abs(inv.m[8]) > 1e-15) {
        const double s = inv.m[8];
        for (double& v : inv.m) {
            v /= s;
        }
    }
    return inv;
}

namespace {

// Similarity that moves the centroid to the origin and the mean distance to
// sqrt(2); keeps the linear system well conditioned for large coordinates.
Eigen::Matrix3d normalizer(const std::array<Point2d, 4>& pts)
{
    double cx = 0, cy = 0;
    for (const auto& p : pts) {
        cx += p.x / 4;
        cy += p.y / 4;
    }
    double mean = 0;
    for (const auto& p : pts) {
        mean += std::hypot(p.x - cx, p.y - cy) / 4;
    }
    const double s = mean > 0 ? std::sqrt(2.0) / mean : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

bool nearly_collinear(const Point2d& a, const Point2d& b, const Point2d& c, double scale2)
{
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return std::abs(cross) <= 1e-9 * scale2;
}

void check_points(const std::array<Point2d, 4>& pts)
{
    double scale2 = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            scale2 = std::max(scale2, std::pow(pts[i].x - pts[j].x, 2) +
                                          std::pow(pts[i].y - pts[j].y, 2));
        }
    }
    if (!(scale2 > 0)) {
        throw DegenerateQuad("coincident corners");
    }
    for (int i = 0; i < 4; ++i) {
        if (nearly_collinear(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4], scale2)) {
            throw DegenerateQuad("three corners are collinear");
        }
    }
}

} // namespace

Homography homography_from_points(const std::array<Point2d, 4>& src,
                                  const std::array<Point2d, 4>& dst)
{
    check_points(src);
    check_points(dst);
    const Eigen::Matrix3d ts = normalizer(src);
    const Eigen::Matrix3d td = normalizer(dst);

    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector3d s = ts * Eigen::Vector3d(src[i].x, src[i].y, 1);
        const Eigen::Vector3d d = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1);
        const double x = s.x(), y = s.y(), u = d.x(), v = d.y();
        a.row(2 * i) << x, y, 1, 0, 0, 0, -x * u, -y * u;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * v, -y * v;
        b(2 * i) = u;
        b(2 * i + 1) = v;
    }
    const Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
    if (lu.rank() < 8) {
        throw DegenerateQuad("singular correspondence system");
    }
    Eigen::Matrix<double, 8, 1> h = lu.solve(b);
    // One round of iterative refinement.
    h += lu.solve(b - a * h);

    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    Eigen::Matrix3d full = td.inverse() * hn * ts;
    if (!(std::abs(full(2, 2)) > 1e-300)) {
        throw DegenerateQuad("homography has a zero bottom-right entry");
    }
    full /= full(2, 2);

    Homography out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            out.m[r * 3 + c] = full(r, c);
        }
    }
    if (!(std::abs(out.determinant()) > 1e-12)) {
        throw DegenerateQuad("homography is not invertible");
    }
    return out;
}

Homography homography_from_quad(const Quad& quad, double side)
{
    if (!(side > 0)) {
        throw std::invalid_argument("rectified side must be positive");
    }
    return homography_from_points(quad.corners, {Point2d{0, 0}, Point2d{side, 0},
                                                 Point2d{side, side}, Point2d{0, side}});
}

GrayImage rectify(const GrayImage& gray, const Homography& h, int side)
{
    if (side < 1) {
        throw std::invalid_argument("rectified side must be >= 1");
    }
    if (gray.empty()) {
        throw std::invalid_argument("cannot rectify an empty image");
    }
    const Homography inv = h.inverse();
    GrayImage out(side, side);
    for (int v = 0; v < side; ++v) {
        for (int u = 0; u < side; ++u) {
            const Point2d p = inv.apply({u + 0.5, v + 0.5});
            const double s = sample_bilinear(gray, p.x, p.y);
            out.at(u, v) = static_cast<std::uint8_t>(std::clamp(std::lround(s), 0L, 255L));
        }
    }
    return out;
}

} // namespace autotag
