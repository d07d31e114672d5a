#include "autotag/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace autotag {

double signed_area(const Quad& q)
{
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Point2d& a = q.corners[i];
        const Point2d& b = q.corners[(i + 1) % 4];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

bool is_convex(const Quad& q)
{
    int sign = 0;
    for (int i = 0; i < 4; ++i) {
        const Point2d& a = q.corners[i];
        const Point2d& b = q.corners[(i + 1) % 4];
        const Point2d& c = q.corners[(i + 2) % 4];
        const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if (cross == 0.0) {
            return false;
        }
        const int s = cross > 0 ? 1 : -1;
        if (sign != 0 && s != sign) {
            return false;
        }
        sign = s;
    }
    return true;
}

double min_side_length(const Quad& q)
{
    double best = INFINITY;
    for (int i = 0; i < 4; ++i) {
        const Point2d& a = q.corners[i];
        const Point2d& b = q.corners[(i + 1) % 4];
        best = std::min(best, std::hypot(b.x - a.x, b.y - a.y));
    }
    return best;
}

Quad rotate_corners(const Quad& q, int k)
{
    k = ((k % 4) + 4) % 4;
    Quad out;
    for (int i = 0; i < 4; ++i) {
        out.corners[i] = q.corners[(i + k) % 4];
    }
    return out;
}

Quad make_clockwise(const Quad& q)
{
    if (signed_area(q) >= 0) {
        return q;
    }
    return Quad{{q.corners[0], q.corners[3], q.corners[2], q.corners[1]}};
}

Box bounding_box(const Quad& q)
{
    Box b{q.corners[0].x, q.corners[0].y, q.corners[0].x, q.corners[0].y};
    for (const Point2d& p : q.corners) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

double box_iou(const Box& a, const Box& b)
{
    const Box inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                    std::min(a.y1, b.y1)};
    const double i = inter.area();
    const double u = a.area() + b.area() - i;
    return u > 0 ? i / u : 0.0;
}

} // namespace autotag
