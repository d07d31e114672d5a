#include "autotag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autotag {

namespace {

constexpr std::uint8_t kFill = 114;
constexpr double kMinResidual = 0.10;

} // namespace

LabeledImage mosaic_at(const std::array<LabeledImage, 4>& items, int out_width, int out_height,
                       Point2d split)
{
    if (out_width < 2 || out_height < 2) {
        throw std::invalid_argument("mosaic canvas must be at least 2x2");
    }
    for (const auto& item : items) {
        if (item.image.empty()) {
            throw std::invalid_argument("mosaic source image is empty");
        }
    }
    const int sx = std::clamp(static_cast<int>(std::lround(split.x)), 0, out_width);
    const int sy = std::clamp(static_cast<int>(std::lround(split.y)), 0, out_height);
    const int rw = out_width / 2;
    const int rh = out_height / 2;

    LabeledImage out{RgbImage(out_width, out_height, kFill), {}};
    // Top-left, top-right, bottom-left, bottom-right.
    const int quadrant[4][4] = {{0, 0, sx, sy},
                                {sx, 0, out_width, sy},
                                {0, sy, sx, out_height},
                                {sx, sy, out_width, out_height}};
    const int offset[4][2] = {{sx - rw, sy - rh}, {sx, sy - rh}, {sx - rw, sy}, {sx, sy}};

    for (int q = 0; q < 4; ++q) {
        const RgbImage src = resize_bilinear(items[q].image, rw, rh);
        const int qx0 = quadrant[q][0];
        const int qy0 = quadrant[q][1];
        const int qx1 = quadrant[q][2];
        const int qy1 = quadrant[q][3];
        const int ox = offset[q][0];
        const int oy = offset[q][1];
        for (int y = std::max(qy0, oy); y < std::min(qy1, oy + rh); ++y) {
            for (int x = std::max(qx0, ox); x < std::min(qx1, ox + rw); ++x) {
                for (int c = 0; c < 3; ++c) {
                    out.image.at(x, y, c) = src.at(x - ox, y - oy, c);
                }
            }
        }

        const double cx0 = std::max(qx0, ox);
        const double cy0 = std::max(qy0, oy);
        const double cx1 = std::min(qx1, ox + rw);
        const double cy1 = std::min(qy1, oy + rh);
        for (const AnnotationRecord& rec : items[q].labels) {
            const Box b = rec.bbox.corners();
            const double x0 = ox + b.x0 * rw;
            const double y0 = oy + b.y0 * rh;
            const double x1 = ox + b.x1 * rw;
            const double y1 = oy + b.y1 * rh;
            const double full = (x1 - x0) * (y1 - y0);
            const Box clipped{std::max(x0, cx0), std::max(y0, cy0), std::min(x1, cx1),
                              std::min(y1, cy1)};
            if (!(full > 0) || clipped.area() < kMinResidual * full) {
                continue;
            }
            AnnotationRecord moved;
            moved.class_index = rec.class_index;
            moved.bbox.cx = (clipped.x0 + clipped.x1) / 2 / out_width;
            moved.bbox.cy = (clipped.y0 + clipped.y1) / 2 / out_height;
            moved.bbox.w = clipped.width() / out_width;
            moved.bbox.h = clipped.height() / out_height;
            out.labels.push_back(moved);
        }
    }
    return out;
}

LabeledImage mosaic(const std::array<LabeledImage, 4>& items, int out_width, int out_height,
                    Rng& rng)
{
    const double x = uniform(rng, 0.25 * out_width, 0.75 * out_width);
    const double y = uniform(rng, 0.25 * out_height, 0.75 * out_height);
    return mosaic_at(items, out_width, out_height, {x, y});
}

} // namespace autotag
