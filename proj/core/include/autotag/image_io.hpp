#pragma once

#include "autotag/image.hpp"

#include <filesystem>

namespace autotag {

// PNG (via libpng) and binary PNM (P5 gray / P6 color). The format is chosen
// by file extension: .png, .pgm, .ppm, .pnm. Failures throw IoError.

bool is_supported_image(const std::filesystem::path& path);

GrayImage read_gray(const std::filesystem::path& path);
RgbImage read_rgb(const std::filesystem::path& path);

void write_image(const std::filesystem::path& path, const GrayImage& img);
void write_image(const std::filesystem::path& path, const RgbImage& img);

// Writes to a sibling temporary and renames over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

} // namespace autotag
