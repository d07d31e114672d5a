#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace autotag {

// 8-bit interleaved raster, row-major.
template <int Channels>
struct Image
{
    static constexpr int kChannels = Channels;

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0) : width(w), height(h)
    {
        if (w < 0 || h < 0) {
            throw std::invalid_argument("image dimensions must be non-negative");
        }
        data.assign(static_cast<std::size_t>(w) * h * Channels, fill);
    }

    bool empty() const noexcept { return width == 0 || height == 0; }
    std::size_t index(int x, int y, int c = 0) const noexcept
    {
        return (static_cast<std::size_t>(y) * width + x) * Channels + c;
    }
    std::uint8_t& at(int x, int y, int c = 0) noexcept { return data[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c = 0) const noexcept { return data[index(x, y, c)]; }
    bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width && y < height;
    }

    friend bool operator==(const Image&, const Image&) = default;
};

using GrayImage = Image<1>;
using RgbImage = Image<3>;

// Foreground mask; 1 = foreground (dark candidate), 0 = background.
struct BinaryImage
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;

    BinaryImage() = default;
    BinaryImage(int w, int h) : width(w), height(h), mask(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const noexcept
    {
        return mask[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) noexcept
    {
        mask[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

// Luminance 0.299R + 0.587G + 0.114B, rounded to nearest.
GrayImage to_gray(const RgbImage& rgb);
RgbImage to_rgb(const GrayImage& gray);

// Clamp-to-edge bilinear sample at continuous coordinates where pixel (x, y)
// covers [x, x+1) x [y, y+1) and its center sits at (x + 0.5, y + 0.5).
double sample_bilinear(const GrayImage& img, double x, double y);

// Bilinear resize of the whole image onto a new grid (pixel-center aligned).
RgbImage resize_bilinear(const RgbImage& img, int width, int height);

} // namespace autotag
