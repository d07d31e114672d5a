#include "autotag/contour.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace autotag {

namespace {

// Moore neighbourhood, clockwise on screen starting at west.
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int direction_of(int dx, int dy)
{
    for (int d = 0; d < 8; ++d) {
        if (kDx[d] == dx && kDy[d] == dy) {
            return d;
        }
    }
    return -1;
}

struct Step
{
    Pixel next;
    int backtrack = 0;  // direction from `next` to the last background pixel seen
};

std::vector<Pixel> trace_from(const BinaryImage& img, Pixel start)
{
    const auto fg = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < img.width && y < img.height && img.at(x, y);
    };
    const auto step = [&](Pixel c, int backtrack) -> std::optional<Step> {
        for (int i = 1; i <= 8; ++i) {
            const int d = (backtrack + i) % 8;
            const Pixel p{c.x + kDx[d], c.y + kDy[d]};
            if (fg(p.x, p.y)) {
                const int prev = (d + 7) % 8;
                const int bx = c.x + kDx[prev] - p.x;
                const int by = c.y + kDy[prev] - p.y;
                return Step{p, direction_of(bx, by)};
            }
        }
        return std::nullopt;
    };

    // The first raster pixel of a component always has background to the west.
    const auto first = step(start, 0);
    if (!first) {
        return {start};
    }
    std::vector<Pixel> contour{start};
    Pixel c = first->next;
    int backtrack = first->backtrack;
    const std::size_t guard = 4 * static_cast<std::size_t>(img.width) * img.height + 8;
    while (contour.size() < guard) {
        const auto s = step(c, backtrack);
        if (c == start && s->next == first->next) {
            break;
        }
        contour.push_back(c);
        c = s->next;
        backtrack = s->backtrack;
    }
    return contour;
}

double segment_distance(const Point2d& p, const Point2d& a, const Point2d& b)
{
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    if (len2 == 0.0) {
        return std::hypot(p.x - a.x, p.y - a.y);
    }
    const double t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Marks the points of pts[lo..hi] (indices modulo size) that survive DP.
void douglas_peucker(const std::vector<Point2d>& pts, std::size_t lo, std::size_t hi,
                     double epsilon, std::vector<char>& keep)
{
    const std::size_t n = pts.size();
    std::vector<std::pair<std::size_t, std::size_t>> stack{{lo, hi}};
    while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const std::size_t span = (b + n - a) % n;
        if (span < 2) {
            continue;
        }
        double best = -1.0;
        std::size_t best_i = a;
        for (std::size_t k = 1; k < span; ++k) {
            const std::size_t i = (a + k) % n;
            const double d = segment_distance(pts[i], pts[a], pts[b]);
            if (d > best) {
                best = d;
                best_i = i;
            }
        }
        if (best > epsilon) {
            keep[best_i] = 1;
            stack.emplace_back(a, best_i);
            stack.emplace_back(best_i, b);
        }
    }
}

std::size_t farthest_from(const std::vector<Point2d>& pts, const Point2d& p)
{
    std::size_t idx = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::hypot(pts[i].x - p.x, pts[i].y - p.y);
        if (d > best) {
            best = d;
            idx = i;
        }
    }
    return idx;
}

// Pushes every edge of a clockwise quad outward by `delta` and re-intersects.
std::optional<Quad> offset_quad(const Quad& q, double delta)
{
    std::array<Point2d, 4> base{};
    std::array<Point2d, 4> dir{};
    for (int i = 0; i < 4; ++i) {
        const Point2d& a = q.corners[i];
        const Point2d& b = q.corners[(i + 1) % 4];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        if (len == 0.0) {
            return std::nullopt;
        }
        base[i] = {a.x + delta * dy / len, a.y - delta * dx / len};
        dir[i] = {dx, dy};
    }
    Quad out;
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 3) % 4;  // previous edge ends at corner i
        const double det = dir[j].x * dir[i].y - dir[j].y * dir[i].x;
        if (std::abs(det) < 1e-12) {
            return std::nullopt;
        }
        const double rx = base[i].x - base[j].x;
        const double ry = base[i].y - base[j].y;
        const double t = (rx * dir[i].y - ry * dir[i].x) / det;
        out.corners[i] = {base[j].x + t * dir[j].x, base[j].y + t * dir[j].y};
    }
    return out;
}

} // namespace

std::vector<std::vector<Pixel>> trace_outer_contours(const BinaryImage& binary, long min_bbox_area)
{
    const int w = binary.width;
    const int h = binary.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::vector<Pixel>> contours;
    std::vector<Pixel> stack;
    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!binary.mask[idx] || label[idx] != 0) {
                continue;
            }
            // Flood the component to find its extent.
            ++next_label;
            int x0 = x, x1 = x, y0 = y, y1 = y;
            label[idx] = next_label;
            stack.assign(1, Pixel{x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d];
                    const int ny = p.y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                        continue;
                    }
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (binary.mask[nidx] && label[nidx] == 0) {
                        label[nidx] = next_label;
                        stack.push_back({nx, ny});
                    }
                }
            }
            const long bbox_area = static_cast<long>(x1 - x0 + 1) * (y1 - y0 + 1);
            if (bbox_area < min_bbox_area) {
                continue;
            }
            contours.push_back(trace_from(binary, Pixel{x, y}));
        }
    }
    return contours;
}

double closed_perimeter(const std::vector<Point2d>& contour)
{
    double p = 0.0;
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const Point2d& a = contour[i];
        const Point2d& b = contour[(i + 1) % contour.size()];
        p += std::hypot(b.x - a.x, b.y - a.y);
    }
    return p;
}

std::vector<Point2d> simplify_closed(const std::vector<Point2d>& contour, double epsilon)
{
    if (contour.size() < 3) {
        return contour;
    }
    const std::size_t a = farthest_from(contour, contour[0]);
    const std::size_t b = farthest_from(contour, contour[a]);
    if (a == b) {
        return {contour[a]};
    }
    std::vector<char> keep(contour.size(), 0);
    keep[a] = keep[b] = 1;
    douglas_peucker(contour, a, b, epsilon, keep);
    douglas_peucker(contour, b, a, epsilon, keep);
    std::vector<Point2d> out;
    for (std::size_t k = 0; k < contour.size(); ++k) {
        const std::size_t i = (a + k) % contour.size();
        if (keep[i]) {
            out.push_back(contour[i]);
        }
    }
    return out;
}

std::vector<Quad> extract_quad_candidates(const BinaryImage& binary, const DetectParams& params)
{
    const double image_area = static_cast<double>(binary.width) * binary.height;
    const double min_area = params.min_area * image_area;
    const double max_area = params.max_area * image_area;

    std::vector<Quad> quads;
    for (const auto& contour : trace_outer_contours(binary, static_cast<long>(min_area))) {
        if (contour.size() < 4) {
            continue;
        }
        std::vector<Point2d> pts;
        pts.reserve(contour.size());
        for (const Pixel& p : contour) {
            pts.push_back({p.x + 0.5, p.y + 0.5});
        }
        const auto poly = simplify_closed(pts, params.epsilon * closed_perimeter(pts));
        if (poly.size() != 4) {
            continue;
        }
        Quad q = make_clockwise(Quad{{poly[0], poly[1], poly[2], poly[3]}});
        if (!is_convex(q)) {
            continue;
        }
        const auto grown = offset_quad(q, 0.5);
        if (!grown || !is_convex(*grown)) {
            continue;
        }
        const double area = signed_area(*grown);
        if (area < min_area || area > max_area || min_side_length(*grown) <= 0.0) {
            continue;
        }
        quads.push_back(*grown);
    }
    return quads;
}

} // namespace autotag
