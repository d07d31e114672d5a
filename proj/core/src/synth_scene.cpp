#include "autotag/synth.hpp"

#include "autotag/errors.hpp"
#include "autotag/homography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autotag {

Quad project_square(const Placement& p, double half_extent)
{
    const double distance = kCameraDistanceSides * p.side;
    const double cr = std::cos(p.roll);
    const double sr = std::sin(p.roll);
    const double kx = std::cos(p.tilt_axis);
    const double ky = std::sin(p.tilt_axis);
    const double ct = std::cos(p.tilt);
    const double st = std::sin(p.tilt);

    const double corners[4][2] = {{-half_extent, -half_extent},
                                  {half_extent, -half_extent},
                                  {half_extent, half_extent},
                                  {-half_extent, half_extent}};
    Quad q;
    for (int i = 0; i < 4; ++i) {
        // In-plane roll.
        const double x = cr * corners[i][0] - sr * corners[i][1];
        const double y = sr * corners[i][0] + cr * corners[i][1];
        // Rodrigues rotation about the in-plane axis (kx, ky, 0).
        const double dot = kx * x + ky * y;
        const double cross_z = kx * y - ky * x;  // (k x v).z
        const double rx = x * ct + kx * dot * (1 - ct);
        const double ry = y * ct + ky * dot * (1 - ct);
        const double rz = cross_z * st;
        const double scale = distance / (distance + rz);
        q.corners[i] = {p.center.x + rx * scale, p.center.y + ry * scale};
    }
    return q;
}

Box placement_footprint(const Placement& p, int cells)
{
    const double half = p.side / 2 * (cells + 4.0) / (cells + 2.0);
    return bounding_box(project_square(p, half));
}

namespace {

void check_placement(const Placement& p, const MarkerDictionary& dict)
{
    (void)dict.bits(p.id);
    if (!(p.side > 0)) {
        throw std::invalid_argument("placement side must be positive");
    }
    if (!(p.tilt >= 0.0 && p.tilt < 1.4)) {
        throw std::invalid_argument("placement tilt must lie in [0, 1.4) rad");
    }
}

bool boxes_intersect(const Box& a, const Box& b)
{
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

// Marker texture in cell units: quiet zone, border, payload. 255 = white.
std::uint8_t texel(const BitMatrix& bits, int n, double u, double v)
{
    const int cx = static_cast<int>(std::floor(u)) - 1;  // -1 = quiet zone
    const int cy = static_cast<int>(std::floor(v)) - 1;
    if (cx < 0 || cy < 0 || cx > n + 1 || cy > n + 1) {
        return 255;
    }
    if (cx == 0 || cy == 0 || cx == n + 1 || cy == n + 1) {
        return 0;
    }
    return bits(cy - 1, cx - 1) ? 0 : 255;
}

} // namespace

Scene compose_scene(const RgbImage& background, const std::vector<Placement>& placements,
                    const MarkerDictionary& dict)
{
    if (background.empty()) {
        throw std::invalid_argument("background image is empty");
    }
    const int n = dict.cells;
    std::vector<Box> footprints;
    for (const Placement& p : placements) {
        check_placement(p, dict);
        const Box fp = placement_footprint(p, n);
        if (fp.x0 < 0 || fp.y0 < 0 || fp.x1 > background.width || fp.y1 > background.height) {
            throw OutOfBounds("marker " + std::to_string(p.id) + " does not fit in the image");
        }
        for (const Box& other : footprints) {
            if (boxes_intersect(fp, other)) {
                throw PlacementOverlap("marker " + std::to_string(p.id) +
                                       " overlaps an earlier placement");
            }
        }
        footprints.push_back(fp);
    }

    Scene scene{background, {}};
    constexpr int kSub = 4;
    const double texture = n + 4.0;
    for (std::size_t k = 0; k < placements.size(); ++k) {
        const Placement& p = placements[k];
        const BitMatrix& bits = dict.bits(p.id);
        const Quad outer = project_square(p, p.side / 2 * texture / (n + 2.0));
        // Image -> texture.
        const Homography to_texture = homography_from_points(
            outer.corners,
            {Point2d{0, 0}, Point2d{texture, 0}, Point2d{texture, texture}, Point2d{0, texture}});
        const Point2d mid = p.center;
        const double ref_w = to_texture.m[6] * mid.x + to_texture.m[7] * mid.y + to_texture.m[8];

        const Box& fp = footprints[k];
        const int x0 = static_cast<int>(std::floor(fp.x0));
        const int y0 = static_cast<int>(std::floor(fp.y0));
        const int x1 = std::min(background.width, static_cast<int>(std::ceil(fp.x1)));
        const int y1 = std::min(background.height, static_cast<int>(std::ceil(fp.y1)));
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                int covered = 0;
                int ink = 0;
                for (int sy = 0; sy < kSub; ++sy) {
                    for (int sx = 0; sx < kSub; ++sx) {
                        const Point2d s{x + (sx + 0.5) / kSub, y + (sy + 0.5) / kSub};
                        const double w = to_texture.m[6] * s.x + to_texture.m[7] * s.y +
                                         to_texture.m[8];
                        if (w * ref_w <= 0) {
                            continue;
                        }
                        const Point2d t = to_texture.apply(s);
                        if (t.x < 0 || t.y < 0 || t.x >= texture || t.y >= texture) {
                            continue;
                        }
                        ++covered;
                        ink += texel(bits, n, t.x, t.y);
                    }
                }
                if (covered == 0) {
                    continue;
                }
                const double alpha = static_cast<double>(covered) / (kSub * kSub);
                const double value = static_cast<double>(ink) / covered;
                for (int c = 0; c < 3; ++c) {
                    const double bg = scene.image.at(x, y, c);
                    scene.image.at(x, y, c) =
                        static_cast<std::uint8_t>(std::lround(alpha * value + (1 - alpha) * bg));
                }
            }
        }

        GroundTruth gt;
        gt.id = p.id;
        gt.quad = project_square(p, p.side / 2);
        gt.bbox = quad_to_bbox(gt.quad, background.width, background.height);
        scene.truths.push_back(gt);
    }
    return scene;
}

RgbImage solid_background(int width, int height, std::uint8_t level)
{
    return RgbImage(width, height, level);
}

RgbImage noise_background(int width, int height, Rng& rng)
{
    const double base = uniform(rng, 70.0, 190.0);
    const double tint[3] = {uniform(rng, -15, 15), uniform(rng, -15, 15), uniform(rng, -15, 15)};
    struct Octave
    {
        int cell;
        double amplitude;
        int gw, gh;
        std::vector<double> grid;
    };
    std::vector<Octave> octaves{{64, 40.0, 0, 0, {}}, {24, 20.0, 0, 0, {}}, {8, 8.0, 0, 0, {}}};
    for (auto& o : octaves) {
        o.gw = width / o.cell + 2;
        o.gh = height / o.cell + 2;
        o.grid.resize(static_cast<std::size_t>(o.gw) * o.gh);
        for (double& g : o.grid) {
            g = uniform(rng, -1.0, 1.0);
        }
    }
    const auto smooth = [](double t) { return t * t * (3 - 2 * t); };
    RgbImage out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = base;
            for (const auto& o : octaves) {
                const double fx = static_cast<double>(x) / o.cell;
                const double fy = static_cast<double>(y) / o.cell;
                const int ix = static_cast<int>(fx);
                const int iy = static_cast<int>(fy);
                const double ax = smooth(fx - ix);
                const double ay = smooth(fy - iy);
                const auto g = [&o](int gx, int gy) { return o.grid[gy * o.gw + gx]; };
                const double top = g(ix, iy) * (1 - ax) + g(ix + 1, iy) * ax;
                const double bot = g(ix, iy + 1) * (1 - ax) + g(ix + 1, iy + 1) * ax;
                v += o.amplitude * (top * (1 - ay) + bot * ay);
            }
            for (int c = 0; c < 3; ++c) {
                out.at(x, y, c) =
                    static_cast<std::uint8_t>(std::clamp(std::lround(v + tint[c]), 0L, 255L));
            }
        }
    }
    return out;
}

} // namespace autotag
