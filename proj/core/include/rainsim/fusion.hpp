#pragma once
// Image formation. The unified rain model treats each depth slice as a
// partially transmissive veil: walking slices front to back, a running
// transmittance T and an accumulated ambient emission E are updated per
// pixel, and the final intensity is B*T + E. The same machinery covers the
// continuous haze model (exponential transmission), its discrete
// homogeneous counterpart, and the four classic screen-blend baselines.

#include <cassert>
#include <cstdint>
#include <vector>

#include "rainsim/layering.hpp"
#include "rainsim/raster.hpp"
#include "rainsim/streaks.hpp"

namespace rainsim {

// Rain fusion parameters: alpha is the attenuation ratio, the fraction of
// light blocked per unit streak coverage; A is the global atmospheric
// light, shared by all channels.
struct FusionParams {
  double alpha = 0.75;
  double A = 0.85;
};

void validate(const FusionParams& p);

// Haze parameters: beta is the scattering coefficient per meter.
struct HazeParams {
  double beta = 0.0;
  double A = 0.85;
};

void validate(const HazeParams& p);

// Patch-mean rain coverage for one layer at base resolution, in [0,1].
struct IntensityField {
  int layer_index = 0;
  GrayRaster data;
};

// Bookkeeping for the final store step. The unified and haze models only
// clamp defensively (a nonzero count there indicates a bug upstream);
// the additive baselines clamp by design.
struct FusionStats {
  std::int64_t clamped = 0;
};

// Scalar per-pixel fusion state. Layers are applied nearest first; the
// update keeps T and E exactly within [0,1] in floating point, which the
// range tests rely on.
struct LayerFuser {
  double transmittance = 1.0;
  double emission = 0.0;

  void apply(double q, double alpha, double ambient) {
    const double a = alpha * q;
    emission += ambient * a * transmittance;
    transmittance *= 1.0 - a;
  }
  double resolve(double background) const {
    return background * transmittance + emission;
  }
};

// q_i(x): mean over each base pixel's p x p patch of the masked streak
// layer; equivalently area-average downsampling of S*M to base resolution.
IntensityField rain_intensity(const StreakLayer& layer, const RainMask& mask);

// Unified rain model. q must cover layers 1..layer_count(max depth); the
// per-pixel slice count is layer_count(d(x), cfg).
ClearImage fuse_rain(const ClearImage& B, const DepthMap& depth,
                     const std::vector<IntensityField>& q, const FusionParams& fp,
                     const SliceConfig& cfg, FusionStats* stats = nullptr);

// Continuous haze: H = B*e^{-beta*d} + A*(1 - e^{-beta*d}).
ClearImage asm_haze(const ClearImage& B, const DepthMap& depth, const HazeParams& hp);

// Discrete homogeneous counterpart: transmittance (1 - beta*d_step)^k with
// k = layer_count(d). Requires beta*d_step < 1. Converges to asm_haze at
// first order as d_step shrinks.
ClearImage homogeneous_discrete(const ClearImage& B, const DepthMap& depth,
                                const HazeParams& hp, double d_step);

// Scalar transmittance of the discrete homogeneous model; the verify-limit
// command evaluates this against exp(-beta*depth).
double discrete_transmittance(double beta, double depth_m, double d_step);

// Baselines. S rasters are streak opacities at base resolution.
ClearImage legacy_additive(const ClearImage& B, const GrayRaster& S);
ClearImage legacy_multilayer(const ClearImage& B, const std::vector<GrayRaster>& layers);
ClearImage legacy_haze_first(const ClearImage& B, const DepthMap& depth,
                             const HazeParams& hp, const GrayRaster& S);
ClearImage legacy_rain_first(const ClearImage& B, const DepthMap& depth,
                             const HazeParams& hp, const std::vector<GrayRaster>& layers);

}  // namespace rainsim
