#pragma once
// End-to-end rain synthesis: slice the scene by depth, render one streak
// layer per slice, mask it against scene occlusion, patch-average it to a
// rain intensity field, and fold it into the running per-pixel fusion
// state. Layers are generated from independent RNG substreams and folded
// in slice order, so the result is independent of how many workers render
// layers concurrently and is bit-identical to materializing every field
// and calling fuse_rain once.

#include <cstdint>
#include <functional>

#include "rainsim/fusion.hpp"
#include "rainsim/layering.hpp"
#include "rainsim/raster.hpp"
#include "rainsim/streaks.hpp"

namespace rainsim {

// Full parameter bundle for one synthesis.
struct RainParams {
  std::uint64_t seed = 0;
  double mu = 0.0275;                // expected streak seeds per raster pixel
  RainKernelParams kernel;           // streak shape in layer-raster pixels
  double alpha = 0.75;               // attenuation ratio
  double A = 0.85;                   // global atmospheric light
  double d_step = 0.5;               // slice thickness, meters
  int p_max = 8;                     // patch scale cap
  double max_depth_cap = 100.0;      // slicing stops here even if the scene is deeper
  int threads = 0;                   // layer render workers; 0 = hardware count
};

void validate(const RainParams& p);

struct SynthesisStats {
  FusionStats fusion;
  int layers = 0;  // slices rendered
};

// Optional observer receiving every rendered streak layer in slice order
// (used by the CLI's layer dump flag).
using LayerSink = std::function<void(const StreakLayer&)>;

ClearImage synthesize_rain(const ClearImage& clear, const DepthMap& depth,
                           const RainParams& params, SynthesisStats* stats = nullptr,
                           const LayerSink& sink = {});

}  // namespace rainsim
