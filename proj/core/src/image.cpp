#include "autotag/image.hpp"

#include <algorithm>
#include <cmath>

namespace autotag {

GrayImage to_gray(const RgbImage& rgb)
{
    GrayImage out(rgb.width, rgb.height);
    const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 0.299 * rgb.data[3 * i] + 0.587 * rgb.data[3 * i + 1] +
                         0.114 * rgb.data[3 * i + 2];
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    }
    return out;
}

RgbImage to_rgb(const GrayImage& gray)
{
    RgbImage out(gray.width, gray.height);
    for (std::size_t i = 0; i < gray.data.size(); ++i) {
        out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = gray.data[i];
    }
    return out;
}

double sample_bilinear(const GrayImage& img, double x, double y)
{
    if (!std::isfinite(x) || !std::isfinite(y)) {
        x = y = 0.0;
    }
    const double fx = x - 0.5;
    const double fy = y - 0.5;
    const double flx = std::floor(fx);
    const double fly = std::floor(fy);
    const double ax = fx - flx;
    const double ay = fy - fly;
    const auto clampi = [](double v, int hi) {
        return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi)));
    };
    const int x0 = clampi(flx, img.width - 1);
    const int x1 = clampi(flx + 1, img.width - 1);
    const int y0 = clampi(fly, img.height - 1);
    const int y1 = clampi(fly + 1, img.height - 1);
    const double top = img.at(x0, y0) * (1 - ax) + img.at(x1, y0) * ax;
    const double bottom = img.at(x0, y1) * (1 - ax) + img.at(x1, y1) * ax;
    return top * (1 - ay) + bottom * ay;
}

RgbImage resize_bilinear(const RgbImage& img, int width, int height)
{
    RgbImage out(width, height);
    if (img.empty() || width == 0 || height == 0) {
        return out;
    }
    const double sx = static_cast<double>(img.width) / width;
    const double sy = static_cast<double>(img.height) / height;
    for (int v = 0; v < height; ++v) {
        const double fy = std::clamp((v + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double ay = fy - y0;
        for (int u = 0; u < width; ++u) {
            const double fx = std::clamp((u + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double ax = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = img.at(x0, y0, c) * (1 - ax) + img.at(x1, y0, c) * ax;
                const double bot = img.at(x0, y1, c) * (1 - ax) + img.at(x1, y1, c) * ax;
                out.at(u, v, c) = static_cast<std::uint8_t>(std::lround(top * (1 - ay) + bot * ay));
            }
        }
    }
    return out;
}

} // namespace autotag
