#include "autotag/image_io.hpp"

#include "autotag/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace autotag {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_png(const fs::path& path) { return lower_ext(path) == ".png"; }

void require_supported(const fs::path& path)
{
    if (!is_supported_image(path)) {
        throw IoError(path.string() + ": unsupported image extension");
    }
}

// Reads a PNG through the simplified API. `channels` is 1 or 3, or 0 to keep
// the file's own gray/color layout; it is updated to what was decoded.
std::vector<std::uint8_t> read_png(const fs::path& path, int& channels, int& w, int& h)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError(path.string() + ": " + image.message);
    }
    if (channels == 0) {
        channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
    }
    image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    // Composite any alpha onto white.
    png_color background{255, 255, 255};
    if (!png_image_finish_read(&image, &background, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError(path.string() + ": " + msg);
    }
    w = static_cast<int>(image.width);
    h = static_cast<int>(image.height);
    return buf;
}

void write_png(const fs::path& path, const std::uint8_t* data, int w, int h, int channels)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
        throw IoError(path.string() + ": " + image.message);
    }
}

struct PnmData
{
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

int read_header_int(std::istream& in, const fs::path& path)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = 0;
    if (!(in >> v) || v < 0) {
        throw IoError(path.string() + ": malformed PNM header");
    }
    return v;
}

PnmData read_pnm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open");
    }
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    PnmData pnm;
    if (magic == "P5") {
        pnm.channels = 1;
    } else if (magic == "P6") {
        pnm.channels = 3;
    } else {
        throw IoError(path.string() + ": not a binary PGM/PPM");
    }
    pnm.width = read_header_int(in, path);
    pnm.height = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (maxval != 255) {
        throw IoError(path.string() + ": only 8-bit PNM is supported");
    }
    in.get();  // single whitespace before raster
    pnm.data.resize(static_cast<std::size_t>(pnm.width) * pnm.height * pnm.channels);
    in.read(reinterpret_cast<char*>(pnm.data.data()), static_cast<std::streamsize>(pnm.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(pnm.data.size())) {
        throw IoError(path.string() + ": truncated raster");
    }
    return pnm;
}

void write_pnm(const fs::path& path, const std::uint8_t* data, int w, int h, int channels)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    out << (channels == 1 ? "P5" : "P6") << '\n' << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(static_cast<std::size_t>(w) * h * channels));
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

} // namespace

bool is_supported_image(const fs::path& path)
{
    const std::string ext = lower_ext(path);
    return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

GrayImage read_gray(const fs::path& path)
{
    require_supported(path);
    GrayImage img;
    if (is_png(path)) {
        // Color files go through to_gray so PNG and PNM agree.
        int channels = 0;
        std::vector<std::uint8_t> data = read_png(path, channels, img.width, img.height);
        if (channels == 3) {
            RgbImage rgb;
            rgb.width = img.width;
            rgb.height = img.height;
            rgb.data = std::move(data);
            return to_gray(rgb);
        }
        img.data = std::move(data);
        return img;
    }
    PnmData pnm = read_pnm(path);
    if (pnm.channels == 3) {
        RgbImage rgb;
        rgb.width = pnm.width;
        rgb.height = pnm.height;
        rgb.data = std::move(pnm.data);
        return to_gray(rgb);
    }
    img.width = pnm.width;
    img.height = pnm.height;
    img.data = std::move(pnm.data);
    return img;
}

RgbImage read_rgb(const fs::path& path)
{
    require_supported(path);
    RgbImage img;
    if (is_png(path)) {
        int channels = 3;
        img.data = read_png(path, channels, img.width, img.height);
        return img;
    }
    PnmData pnm = read_pnm(path);
    if (pnm.channels == 1) {
        GrayImage gray;
        gray.width = pnm.width;
        gray.height = pnm.height;
        gray.data = std::move(pnm.data);
        return to_rgb(gray);
    }
    img.width = pnm.width;
    img.height = pnm.height;
    img.data = std::move(pnm.data);
    return img;
}

void write_image(const fs::path& path, const GrayImage& img)
{
    require_supported(path);
    if (is_png(path)) {
        write_png(path, img.data.data(), img.width, img.height, 1);
    } else {
        write_pnm(path, img.data.data(), img.width, img.height, 1);
    }
}

void write_image(const fs::path& path, const RgbImage& img)
{
    require_supported(path);
    if (is_png(path)) {
        write_png(path, img.data.data(), img.width, img.height, 3);
    } else {
        write_pnm(path, img.data.data(), img.width, img.height, 3);
    }
}

void write_text_atomic(const fs::path& path, const std::string& text)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(tmp.string() + ": cannot open for writing");
        }
        out << text;
        if (!out.flush()) {
            throw IoError(tmp.string() + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw IoError(path.string() + ": " + ec.message());
    }
}

} // namespace autotag
