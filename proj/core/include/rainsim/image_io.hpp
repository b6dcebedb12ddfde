#pragma once
// File I/O for images and depth maps.
//
// Images are 8- or 16-bit RGB PNG; codes are normalized to [0,1] by the
// format's full scale with no gamma transform, and written back at 8 bits
// with half-away-from-zero rounding. Depth comes from 16-bit grayscale PNG
// or binary PFM; in both cases depth = raw value * scale, where scale is
// the caller's meters-per-code-unit factor (PFM rasters are usually already
// metric, so scale is typically 1).

#include <filesystem>

#include "rainsim/raster.hpp"

namespace rainsim {

ClearImage load_image(const std::filesystem::path& path);

DepthMap load_depth(const std::filesystem::path& path, double scale);

// Clamps to [0,1], quantizes to 8-bit codes, writes an RGB PNG.
void save_image(const ClearImage& image, const std::filesystem::path& path);

// Same quantization for a single-channel raster, written as grayscale PNG.
// Debug/visualization helper for streak layers and masks.
void save_gray(const GrayRaster& raster, const std::filesystem::path& path);

}  // namespace rainsim
