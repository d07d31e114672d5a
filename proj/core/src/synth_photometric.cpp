#include "autotag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autotag {

AugmentationSpec AugmentationSpec::none()
{
    AugmentationSpec s;
    s.brightness = s.contrast = s.hue = s.saturation = 0.0;
    s.scale_min = s.scale_max = 0.0;
    return s;
}

AugmentationSpec AugmentationSpec::yolo()
{
    AugmentationSpec s;
    s.brightness = 0.40;
    s.contrast = 0.0;
    s.hue = 0.015;
    s.saturation = 0.70;
    s.scale_min = 0.50;
    s.scale_max = 0.50;
    return s;
}

void AugmentationSpec::validate() const
{
    for (double v : {brightness, contrast, hue, saturation, scale_min, scale_max}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("augmentation ranges must be finite and >= 0");
        }
    }
    if (scale_min >= 1.0) {
        throw std::invalid_argument("scale_min must be < 1");
    }
}

JitterFactors sample_jitter(const AugmentationSpec& spec, Rng& rng)
{
    // Four draws every time so later draws do not shift with the spec.
    const auto draw = [&rng](double range) {
        const double u = uniform(rng, -1.0, 1.0);
        return range > 0.0 ? u * range : 0.0;
    };
    JitterFactors f;
    f.brightness = draw(spec.brightness);
    f.contrast = draw(spec.contrast);
    f.hue = draw(spec.hue);
    f.saturation = draw(spec.saturation);
    return f;
}

namespace {

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v)
{
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    v = mx;
    s = mx > 0.0 ? d / mx : 0.0;
    if (d == 0.0) {
        h = 0.0;
    } else if (mx == r) {
        h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / d + 2.0);
    } else {
        h = 60.0 * ((r - g) / d + 4.0);
    }
    if (h < 0.0) {
        h += 360.0;
    }
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b)
{
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r1 = 0, g1 = 0, b1 = 0;
    switch (static_cast<int>(hp) % 6) {
    case 0: r1 = c; g1 = x; break;
    case 1: r1 = x; g1 = c; break;
    case 2: g1 = c; b1 = x; break;
    case 3: g1 = x; b1 = c; break;
    case 4: r1 = x; b1 = c; break;
    default: r1 = c; b1 = x; break;
    }
    const double m = v - c;
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

} // namespace

RgbImage apply_jitter(const RgbImage& image, const JitterFactors& f)
{
    const bool color = f.hue != 0.0 || f.saturation != 0.0;
    if (f.brightness == 0.0 && f.contrast == 0.0 && !color) {
        return image;
    }
    RgbImage out(image.width, image.height);
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
    for (std::size_t i = 0; i < n; ++i) {
        double p[3] = {static_cast<double>(image.data[3 * i]),
                       static_cast<double>(image.data[3 * i + 1]),
                       static_cast<double>(image.data[3 * i + 2])};
        if (f.brightness != 0.0) {
            for (double& v : p) {
                v = clamp255(v * (1.0 + f.brightness));
            }
        }
        if (f.contrast != 0.0) {
            for (double& v : p) {
                v = clamp255((v - 128.0) * (1.0 + f.contrast) + 128.0);
            }
        }
        if (color) {
            double h, s, v;
            rgb_to_hsv(p[0], p[1], p[2], h, s, v);
            h = std::fmod(h + f.hue * 360.0, 360.0);
            if (h < 0.0) {
                h += 360.0;
            }
            s = std::clamp(s * (1.0 + f.saturation), 0.0, 1.0);
            hsv_to_rgb(h, s, v, p[0], p[1], p[2]);
            for (double& c : p) {
                c = clamp255(c);
            }
        }
        for (int c = 0; c < 3; ++c) {
            out.data[3 * i + c] = static_cast<std::uint8_t>(std::lround(p[c]));
        }
    }
    return out;
}

RgbImage photometric_jitter(const RgbImage& image, const AugmentationSpec& spec, Rng& rng)
{
    spec.validate();
    return apply_jitter(image, sample_jitter(spec, rng));
}

} // namespace autotag
