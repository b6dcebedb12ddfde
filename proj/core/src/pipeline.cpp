#include "rainsim/pipeline.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rainsim {

void validate(const RainParams& p) {
  validate(p.kernel);
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) {
    throw std::invalid_argument("mu must be non-negative and finite");
  }
  validate(FusionParams{p.alpha, p.A});
  if (!(p.d_step > 0.0) || !std::isfinite(p.d_step)) {
    throw std::invalid_argument("d_step must be positive and finite");
  }
  if (p.p_max < 1) throw std::invalid_argument("p_max must be at least 1");
  if (!(p.max_depth_cap > 0.0)) {
    throw std::invalid_argument("max_depth_cap must be positive");
  }
  if (p.threads < 0) throw std::invalid_argument("threads must be non-negative");
}

namespace {

int worker_count(int requested) {
  if (requested > 0) return std::min(requested, 64);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

IntensityField make_field(const DepthMap& depth, const LayerGeometry& geom,
                          const RainParams& params) {
  StreakProcessParams proc;
  proc.mu = params.mu;
  proc.seed = params.seed;
  proc.layer_index = geom.layer_index;
  const StreakLayer layer = render_layer(geom, proc, params.kernel);
  return rain_intensity(layer, build_mask(depth, geom));
}

}  // namespace

ClearImage synthesize_rain(const ClearImage& clear, const DepthMap& depth,
                           const RainParams& params, SynthesisStats* stats,
                           const LayerSink& sink) {
  validate(params);
  if (!same_size(clear, depth)) {
    throw std::invalid_argument("synthesize_rain: image and depth dimensions differ");
  }

  const double d_max =
      std::min(static_cast<double>(depth.max_depth), params.max_depth_cap);
  const SliceConfig cfg(params.d_step, d_max, params.p_max);
  const std::vector<LayerGeometry> geoms =
      slice_geometries(cfg, clear.width, clear.height);

  const std::size_t n = clear.pixel_count();
  std::vector<double> transmittance(n, 1.0);
  std::vector<double> emission(n, 0.0);
  std::vector<std::int32_t> k_map(n);
  for (std::size_t px = 0; px < n; ++px) {
    k_map[px] = layer_count(static_cast<double>(depth.data[px]), cfg);
  }

  // Fold one intensity field into the running state; call order must be
  // slice order, which the loops below guarantee.
  const auto fold = [&](const IntensityField& field) {
    const std::int32_t index = field.layer_index;
    for (std::size_t px = 0; px < n; ++px) {
      if (k_map[px] < index) continue;
      const double a = params.alpha * static_cast<double>(field.data.data[px]);
      emission[px] += params.A * a * transmittance[px];
      transmittance[px] *= 1.0 - a;
    }
  };

  const int workers = worker_count(params.threads);
  if (workers <= 1 || sink || geoms.size() <= 1) {
    // Sequential path; also taken when a sink observes layers so that the
    // observer sees slice order without buffering.
    for (const LayerGeometry& geom : geoms) {
      if (sink) {
        StreakProcessParams proc;
        proc.mu = params.mu;
        proc.seed = params.seed;
        proc.layer_index = geom.layer_index;
        const StreakLayer layer = render_layer(geom, proc, params.kernel);
        sink(layer);
        fold(rain_intensity(layer, build_mask(depth, geom)));
      } else {
        fold(make_field(depth, geom, params));
      }
    }
  } else {
    // Bounded lookahead: render up to `workers` layers concurrently but
    // fold strictly in slice order.
    std::deque<std::future<IntensityField>> pending;
    std::size_t next = 0;
    while (next < geoms.size() || !pending.empty()) {
      while (next < geoms.size() &&
             pending.size() < static_cast<std::size_t>(workers)) {
        const LayerGeometry geom = geoms[next++];
        pending.push_back(std::async(std::launch::async, [&depth, geom, &params] {
          return make_field(depth, geom, params);
        }));
      }
      fold(pending.front().get());
      pending.pop_front();
    }
  }

  ClearImage out;
  out.width = clear.width;
  out.height = clear.height;
  out.data.resize(clear.data.size());
  FusionStats local_stats;
  for (std::size_t px = 0; px < n; ++px) {
    const double t = transmittance[px];
    const double e = emission[px];
    for (int c = 0; c < 3; ++c) {
      const double v = static_cast<double>(clear.data[px * 3 + c]) * t + e;
      float f = static_cast<float>(v);
      if (f < 0.0f) {
        f = 0.0f;
        ++local_stats.clamped;
      } else if (f > 1.0f) {
        f = 1.0f;
        ++local_stats.clamped;
      }
      assert(f >= 0.0f && f <= 1.0f);
      out.data[px * 3 + c] = f;
    }
  }

  if (stats) {
    stats->fusion = local_stats;
    stats->layers = static_cast<int>(geoms.size());
  }
  return out;
}

}  // namespace rainsim
