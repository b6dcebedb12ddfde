#include "rainsim/raster.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rainsim {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("raster dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

ClearImage ClearImage::filled(int width, int height, float value) {
  check_dims(width, height);
  ClearImage img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) * height * 3, value);
  return img;
}

DepthMap DepthMap::from_values(int width, int height, std::vector<float> values) {
  check_dims(width, height);
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("depth sample count does not match dimensions");
  }
  float max_depth = 0.0f;
  for (float v : values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw std::invalid_argument("depth samples must be finite and non-negative");
    }
    if (v > max_depth) max_depth = v;
  }
  DepthMap d;
  d.width = width;
  d.height = height;
  d.data = std::move(values);
  d.max_depth = max_depth;
  return d;
}

GrayRaster GrayRaster::zeros(int width, int height) {
  check_dims(width, height);
  GrayRaster g;
  g.width = width;
  g.height = height;
  g.data.assign(static_cast<std::size_t>(width) * height, 0.0f);
  return g;
}

void validate(const ClearImage& image) {
  check_dims(image.width, image.height);
  if (image.data.size() != image.pixel_count() * 3) {
    throw std::invalid_argument("image buffer size does not match dimensions");
  }
  for (float v : image.data) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw std::invalid_argument("image intensities must lie in [0, 1]");
    }
  }
}

void validate(const DepthMap& depth) {
  check_dims(depth.width, depth.height);
  if (depth.data.size() != static_cast<std::size_t>(depth.width) * depth.height) {
    throw std::invalid_argument("depth buffer size does not match dimensions");
  }
  for (float v : depth.data) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw std::invalid_argument("depth samples must be finite and non-negative");
    }
  }
}

}  // namespace rainsim
