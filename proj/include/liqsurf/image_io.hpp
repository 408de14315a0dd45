#pragma once

#include <filesystem>

#include "liqsurf/image.hpp"

namespace liqsurf {

/// Reads an 8-bit PNG or BMP, grayscale or colour, as RGB.
RgbImage read_image(const std::filesystem::path& path);

/// Reads a mask image; any nonzero pixel is interior (1).
EdgeMap read_mask(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Binary mask written as 0 / 255 grayscale.
void write_png(const std::filesystem::path& path, const EdgeMap& mask);

} // namespace liqsurf
