#pragma once
// Depth slicing. The scene volume in front of the camera is cut into slabs
// of thickness d_step; slab i (1-based) ends at depth i*d_step. A pixel
// whose scene depth is d participates in the first layer_count(d) slabs,
// and a slab only draws streaks in front of scene content that lies behind
// it, which the occlusion mask encodes.

#include <cstdint>
#include <vector>

#include "rainsim/raster.hpp"

namespace rainsim {

// Slicing setup shared by every per-layer operation.
struct SliceConfig {
  double d_step = 0.5;  // slab thickness, meters
  double d_max = 0.0;   // far plane actually sliced, meters
  int p_max = 8;        // patch scale cap for distant layers
  int slice_count = 0;  // number of slabs covering [0, d_max]

  SliceConfig() = default;
  SliceConfig(double d_step, double d_max, int p_max);
};

// Largest i in [0, cfg.slice_count] with i*d_step <= depth. Matches
// floor(depth/d_step) except where division rounds across a slab boundary;
// the returned count is always exactly consistent with the i*d_step <= depth
// comparisons used by the occlusion masks.
int layer_count(double depth_m, const SliceConfig& cfg);

// Placement of one slab's streak raster relative to the base image. The
// raster is p times the base resolution per axis so that nearer slabs get
// finer grain and farther ones get coarser grain after patch averaging.
struct LayerGeometry {
  int layer_index = 0;     // 1-based slab index
  double layer_depth = 0;  // layer_index * d_step, meters
  int patch = 1;           // patch scale p = min(layer_index, p_max)
  int base_width = 0;
  int base_height = 0;

  int raster_width() const { return base_width * patch; }
  int raster_height() const { return base_height * patch; }
  std::size_t raster_pixels() const {
    return static_cast<std::size_t>(raster_width()) * raster_height();
  }
};

// Geometries for slabs 1..slice_count at the given base resolution.
std::vector<LayerGeometry> slice_geometries(const SliceConfig& cfg,
                                            int base_width, int base_height);

// Occlusion indicator for one slab at layer-raster resolution: the whole
// p x p patch of a base pixel is 0 where the scene surface is at or in
// front of the slab's far plane, 1 where the slab is airspace in front of
// the surface. Patch-uniform by construction.
struct RainMask {
  LayerGeometry geometry;
  std::vector<std::uint8_t> data;  // raster resolution, row-major

  std::uint8_t at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * geometry.raster_width() + col];
  }
};

RainMask build_mask(const DepthMap& depth, const LayerGeometry& geom);

}  // namespace rainsim
