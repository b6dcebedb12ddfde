#pragma once
// Per-layer rain streak generation. A Poisson point process seeds streak
// positions on the layer raster; each point is stamped with a rasterized
// rain kernel (an anti-aliased rotated line segment) and the result is
// clamped to [0,1] so the raster reads as opacity/coverage.

#include <cstdint>
#include <vector>

#include "rainsim/layering.hpp"
#include "rainsim/raster.hpp"

namespace rainsim {

// Streak shape in layer-raster pixels: segment length, stroke width and
// direction in degrees away from vertical.
struct RainKernelParams {
  double length = 12.0;
  double width = 1.5;
  double direction_deg = 0.0;
};

void validate(const RainKernelParams& p);

// Poisson process setup: mu is the expected point count per raster pixel.
// The RNG substream is derived from (seed, layer_index) so layers can be
// generated in any order, or concurrently, with identical results.
struct StreakProcessParams {
  double mu = 0.0;
  std::uint64_t seed = 0;
  int layer_index = 1;
};

void validate(const StreakProcessParams& p);

struct StreakPoint {
  std::int32_t row = 0;
  std::int32_t col = 0;
};

struct StreakLayer {
  LayerGeometry geometry;
  GrayRaster data;  // opacity in [0,1] at raster resolution
};

// Anti-aliased segment of the given length/width/direction, centered in a
// square raster of side ceil(length)+2. Coverage is estimated on a 4x4
// subsample grid per pixel and the peak is normalized to exactly 1.
GrayRaster rasterize_kernel(const RainKernelParams& p);

// Streak seed positions: count ~ Poisson(mu * raster_pixels), positions
// i.i.d. uniform over the raster. Pure function of (geom, proc).
std::vector<StreakPoint> sample_points(const LayerGeometry& geom,
                                       const StreakProcessParams& proc);

// Stamps the kernel at every sampled point (each distinct point is a unit
// impulse; duplicates collapse), drops contributions that fall outside the
// raster, clamps to [0,1].
StreakLayer render_layer(const LayerGeometry& geom, const StreakProcessParams& proc,
                         const RainKernelParams& kern);

}  // namespace rainsim
