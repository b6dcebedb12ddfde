#pragma once
// Raster containers shared across the pipeline. Image intensities are
// normalized to [0, 1] and stored as float; per-pixel arithmetic downstream
// runs in double and rounds back on store. Depth is in meters.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rainsim {

// Interleaved RGB image, values in [0, 1].
struct ClearImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // r,g,b interleaved, row-major, size = 3*width*height

  static ClearImage filled(int width, int height, float value);

  float& at(int row, int col, int channel) {
    return data[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  float at(int row, int col, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

// Scene depth in meters, row-major.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;
  float max_depth = 0.0f;  // maximum of data, maintained by from_values

  // Validates the samples (finite, >= 0) and records the maximum.
  static DepthMap from_values(int width, int height, std::vector<float> values);

  float at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }
};

// Single-channel raster; the producer defines the semantics (streak
// opacity, rain intensity, ...).
struct GrayRaster {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  static GrayRaster zeros(int width, int height);

  float& at(int row, int col) {
    return data[static_cast<std::size_t>(row) * width + col];
  }
  float at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }
};

// Throws std::invalid_argument on dimension/size mismatch or values outside
// the documented domain.
void validate(const ClearImage& image);
void validate(const DepthMap& depth);

inline bool same_size(const ClearImage& a, const ClearImage& b) {
  return a.width == b.width && a.height == b.height;
}
inline bool same_size(const ClearImage& a, const DepthMap& d) {
  return a.width == d.width && a.height == d.height;
}

}  // namespace rainsim
