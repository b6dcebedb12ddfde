#include "rainsim/layering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rainsim {

SliceConfig::SliceConfig(double d_step_, double d_max_, int p_max_)
    : d_step(d_step_), d_max(d_max_), p_max(p_max_) {
  if (!(d_step > 0.0) || !std::isfinite(d_step)) {
    throw std::invalid_argument("SliceConfig: d_step must be positive and finite");
  }
  if (!(d_max >= 0.0) || !std::isfinite(d_max)) {
    throw std::invalid_argument("SliceConfig: d_max must be non-negative and finite");
  }
  if (p_max < 1) {
    throw std::invalid_argument("SliceConfig: p_max must be at least 1");
  }
  // Smallest k with k*d_step >= d_max. Computed from ceil(), then nudged so
  // the result is exact under the same multiplications layer_count uses.
  auto k = static_cast<long long>(std::ceil(d_max / d_step));
  while (k > 0 && static_cast<double>(k - 1) * d_step >= d_max) --k;
  while (static_cast<double>(k) * d_step < d_max) ++k;
  if (k > 1'000'000) {
    throw std::invalid_argument("SliceConfig: slicing would produce " +
                                std::to_string(k) + " layers; raise d_step");
  }
  slice_count = static_cast<int>(k);
}

int layer_count(double depth_m, const SliceConfig& cfg) {
  if (!(depth_m >= 0.0)) {
    throw std::invalid_argument("layer_count: depth must be non-negative");
  }
  double est = std::floor(depth_m / cfg.d_step);
  est = std::min(est, static_cast<double>(cfg.slice_count));
  int k = static_cast<int>(est);
  while (k > 0 && static_cast<double>(k) * cfg.d_step > depth_m) --k;
  while (k < cfg.slice_count &&
         static_cast<double>(k + 1) * cfg.d_step <= depth_m) {
    ++k;
  }
  return k;
}

std::vector<LayerGeometry> slice_geometries(const SliceConfig& cfg,
                                            int base_width, int base_height) {
  if (base_width <= 0 || base_height <= 0) {
    throw std::invalid_argument("slice_geometries: base dimensions must be positive");
  }
  std::vector<LayerGeometry> out;
  out.reserve(static_cast<std::size_t>(cfg.slice_count));
  for (int i = 1; i <= cfg.slice_count; ++i) {
    LayerGeometry g;
    g.layer_index = i;
    g.layer_depth = static_cast<double>(i) * cfg.d_step;
    g.patch = std::min(i, cfg.p_max);
    g.base_width = base_width;
    g.base_height = base_height;
    out.push_back(g);
  }
  return out;
}

RainMask build_mask(const DepthMap& depth, const LayerGeometry& geom) {
  if (depth.width != geom.base_width || depth.height != geom.base_height) {
    throw std::invalid_argument("build_mask: depth dimensions do not match layer geometry");
  }
  RainMask mask;
  mask.geometry = geom;
  mask.data.assign(geom.raster_pixels(), 0);
  const double plane = geom.layer_depth;
  const int p = geom.patch;
  const int rw = geom.raster_width();
  for (int row = 0; row < depth.height; ++row) {
    for (int col = 0; col < depth.width; ++col) {
      const std::uint8_t open =
          static_cast<double>(depth.at(row, col)) <= plane ? 0 : 1;
      if (!open) continue;
      for (int pr = 0; pr < p; ++pr) {
        std::uint8_t* dst =
            mask.data.data() + static_cast<std::size_t>(row * p + pr) * rw + col * p;
        for (int pc = 0; pc < p; ++pc) dst[pc] = 1;
      }
    }
  }
  return mask;
}

}  // namespace rainsim
