#include "autotag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace autotag {

std::vector<KernelTap> motion_kernel(int length, double angle)
{
    if (length < 1) {
        throw std::invalid_argument("motion blur length must be >= 1");
    }
    std::map<std::pair<int, int>, double> taps;  // (dy, dx) -> weight
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (int i = 0; i < length; ++i) {
        const double t = i - (length - 1) / 2.0;
        // Round half up so even lengths stay contiguous.
        const int dx = static_cast<int>(std::floor(t * c + 0.5));
        const int dy = static_cast<int>(std::floor(t * s + 0.5));
        taps[{dy, dx}] += 1.0 / length;
    }
    std::vector<KernelTap> kernel;
    for (const auto& [key, w] : taps) {
        kernel.push_back({key.second, key.first, w});
    }
    return kernel;
}

std::vector<KernelTap> disk_kernel(double radius)
{
    if (!(radius >= 0.0)) {
        throw std::invalid_argument("defocus radius must be >= 0");
    }
    const int r = static_cast<int>(std::floor(radius));
    const double r2 = radius * radius + 1e-9;
    std::vector<KernelTap> kernel;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= r2) {
                kernel.push_back({dx, dy, 0.0});
            }
        }
    }
    for (auto& t : kernel) {
        t.weight = 1.0 / static_cast<double>(kernel.size());
    }
    return kernel;
}

template <int C>
Image<C> convolve(const Image<C>& image, const std::vector<KernelTap>& kernel)
{
    if (kernel.size() == 1 && kernel[0].dx == 0 && kernel[0].dy == 0) {
        return image;
    }
    Image<C> out(image.width, image.height);
    const int w = image.width;
    const int h = image.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[C] = {};
            for (const KernelTap& t : kernel) {
                const int sx = std::clamp(x + t.dx, 0, w - 1);
                const int sy = std::clamp(y + t.dy, 0, h - 1);
                for (int c = 0; c < C; ++c) {
                    acc[c] += t.weight * image.at(sx, sy, c);
                }
            }
            for (int c = 0; c < C; ++c) {
                out.at(x, y, c) =
                    static_cast<std::uint8_t>(std::clamp(std::lround(acc[c]), 0L, 255L));
            }
        }
    }
    return out;
}

template <int C>
Image<C> motion_blur(const Image<C>& image, int length, double angle)
{
    return convolve(image, motion_kernel(length, angle));
}

template <int C>
Image<C> defocus_blur(const Image<C>& image, double radius)
{
    return convolve(image, disk_kernel(radius));
}

template GrayImage convolve(const GrayImage&, const std::vector<KernelTap>&);
template RgbImage convolve(const RgbImage&, const std::vector<KernelTap>&);
template GrayImage motion_blur(const GrayImage&, int, double);
template RgbImage motion_blur(const RgbImage&, int, double);
template GrayImage defocus_blur(const GrayImage&, double);
template RgbImage defocus_blur(const RgbImage&, double);

RgbImage add_gaussian_noise(const RgbImage& image, double sigma, Rng& rng)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("noise sigma must be >= 0");
    }
    if (sigma == 0.0) {
        return image;
    }
    RgbImage out = image;
    for (auto& v : out.data) {
        const double n = v + sigma * standard_normal(rng);
        v = static_cast<std::uint8_t>(std::clamp(std::lround(n), 0L, 255L));
    }
    return out;
}

RgbImage occlude(const RgbImage& image, double fraction, int count, Rng& rng)
{
    if (!(fraction >= 0.0 && fraction < 1.0) || count < 1) {
        throw std::invalid_argument("occlusion needs fraction in [0, 1) and count >= 1");
    }
    RgbImage out = image;
    if (fraction == 0.0 || image.empty()) {
        return out;
    }
    const double each = fraction * image.width * image.height / count;
    const double side = std::sqrt(each);
    const int rw = std::clamp(static_cast<int>(std::lround(side)), 1, image.width);
    const int rh = std::clamp(static_cast<int>(std::lround(each / rw)), 1, image.height);
    for (int k = 0; k < count; ++k) {
        const int x0 = static_cast<int>(uniform_int(rng, 0, image.width - rw));
        const int y0 = static_cast<int>(uniform_int(rng, 0, image.height - rh));
        for (int y = y0; y < y0 + rh; ++y) {
            for (int x = x0; x < x0 + rw; ++x) {
                for (int c = 0; c < 3; ++c) {
                    out.at(x, y, c) = 128;
                }
            }
        }
    }
    return out;
}

void DegradationSpec::validate() const
{
    if (motion_blur && motion_blur->length < 1) {
        throw std::invalid_argument("motion blur length must be >= 1");
    }
    if (defocus_radius && !(*defocus_radius >= 0.0)) {
        throw std::invalid_argument("defocus radius must be >= 0");
    }
    if (noise_sigma && !(*noise_sigma >= 0.0)) {
        throw std::invalid_argument("noise sigma must be >= 0");
    }
    if (occlusion && !(occlusion->fraction >= 0.0 && occlusion->fraction < 1.0 &&
                       occlusion->count >= 1)) {
        throw std::invalid_argument("occlusion needs fraction in [0, 1) and count >= 1");
    }
}

RgbImage apply_degradation(const RgbImage& image, const DegradationSpec& spec, Rng& rng)
{
    spec.validate();
    RgbImage out = image;
    if (spec.occlusion) {
        out = occlude(out, spec.occlusion->fraction, spec.occlusion->count, rng);
    }
    if (spec.defocus_radius) {
        out = defocus_blur(out, *spec.defocus_radius);
    }
    if (spec.motion_blur) {
        out = motion_blur(out, spec.motion_blur->length, spec.motion_blur->angle);
    }
    if (spec.noise_sigma) {
        out = add_gaussian_noise(out, *spec.noise_sigma, rng);
    }
    return out;
}

} // namespace autotag
