#include "rainsim/fusion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rainsim {

void validate(const FusionParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (!(p.A >= 0.0 && p.A <= 1.0)) {
    throw std::invalid_argument("atmospheric light A must lie in [0, 1]");
  }
}

void validate(const HazeParams& p) {
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) {
    throw std::invalid_argument("beta must be non-negative and finite");
  }
  if (!(p.A >= 0.0 && p.A <= 1.0)) {
    throw std::invalid_argument("atmospheric light A must lie in [0, 1]");
  }
}

namespace {

// Rounds the double-precision result to storage and clamps, counting
// activations. The models that must stay in range by construction assert
// that the clamp never fires.
inline float store(double v, FusionStats* stats) {
  float f = static_cast<float>(v);
  if (f < 0.0f) {
    f = 0.0f;
    if (stats) ++stats->clamped;
  } else if (f > 1.0f) {
    f = 1.0f;
    if (stats) ++stats->clamped;
  }
  return f;
}

void check_dims(const ClearImage& B, const DepthMap& depth, const char* op) {
  if (!same_size(B, depth)) {
    throw std::invalid_argument(std::string(op) + ": image and depth dimensions differ");
  }
}

void check_dims(const ClearImage& B, const GrayRaster& S, const char* op) {
  if (B.width != S.width || B.height != S.height) {
    throw std::invalid_argument(std::string(op) + ": image and raster dimensions differ");
  }
}

}  // namespace

IntensityField rain_intensity(const StreakLayer& layer, const RainMask& mask) {
  const LayerGeometry& g = layer.geometry;
  if (g.layer_index != mask.geometry.layer_index || g.patch != mask.geometry.patch ||
      g.base_width != mask.geometry.base_width ||
      g.base_height != mask.geometry.base_height) {
    throw std::invalid_argument("rain_intensity: layer and mask geometry differ");
  }
  if (layer.data.width != g.raster_width() || layer.data.height != g.raster_height() ||
      mask.data.size() != g.raster_pixels()) {
    throw std::invalid_argument("rain_intensity: raster size does not match geometry");
  }

  IntensityField field;
  field.layer_index = g.layer_index;
  field.data = GrayRaster::zeros(g.base_width, g.base_height);

  const int p = g.patch;
  const int rw = g.raster_width();
  const double inv_area = 1.0 / (static_cast<double>(p) * p);

  for (int row = 0; row < g.base_height; ++row) {
    for (int col = 0; col < g.base_width; ++col) {
      double sum = 0.0;
      for (int pr = 0; pr < p; ++pr) {
        const std::size_t off = (static_cast<std::size_t>(row) * p + pr) * rw +
                                static_cast<std::size_t>(col) * p;
        const float* s = layer.data.data.data() + off;
        const std::uint8_t* m = mask.data.data() + off;
        for (int pc = 0; pc < p; ++pc) sum += static_cast<double>(s[pc]) * m[pc];
      }
      field.data.at(row, col) = static_cast<float>(sum * inv_area);
    }
  }
  return field;
}

ClearImage fuse_rain(const ClearImage& B, const DepthMap& depth,
                     const std::vector<IntensityField>& q, const FusionParams& fp,
                     const SliceConfig& cfg, FusionStats* stats) {
  validate(fp);
  check_dims(B, depth, "fuse_rain");

  const int needed = layer_count(static_cast<double>(depth.max_depth), cfg);
  if (static_cast<int>(q.size()) < needed) {
    throw std::invalid_argument("fuse_rain: need " + std::to_string(needed) +
                                " intensity fields, got " + std::to_string(q.size()));
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].layer_index != static_cast<int>(i) + 1) {
      throw std::invalid_argument("fuse_rain: intensity fields must be ordered by layer");
    }
    if (q[i].data.width != B.width || q[i].data.height != B.height) {
      throw std::invalid_argument("fuse_rain: intensity field dimensions differ from image");
    }
  }

  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());

  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const int k = layer_count(static_cast<double>(depth.data[px]), cfg);
    LayerFuser f;
    for (int i = 0; i < k; ++i) {
      f.apply(static_cast<double>(q[static_cast<std::size_t>(i)].data.data[px]),
              fp.alpha, fp.A);
    }
    for (int c = 0; c < 3; ++c) {
      const float v = store(f.resolve(static_cast<double>(B.data[px * 3 + c])), stats);
      assert(v >= 0.0f && v <= 1.0f);
      out.data[px * 3 + c] = v;
    }
  }
  return out;
}

ClearImage asm_haze(const ClearImage& B, const DepthMap& depth, const HazeParams& hp) {
  validate(hp);
  check_dims(B, depth, "asm_haze");

  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());

  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const double t = std::exp(-hp.beta * static_cast<double>(depth.data[px]));
    const double ambient = hp.A * (1.0 - t);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] =
          store(static_cast<double>(B.data[px * 3 + c]) * t + ambient, nullptr);
    }
  }
  return out;
}

namespace {

// (base)^k by binary exponentiation, k >= 0.
double pow_int(double base, long long k) {
  double result = 1.0;
  double b = base;
  while (k > 0) {
    if (k & 1) result *= b;
    b *= b;
    k >>= 1;
  }
  return result;
}

}  // namespace

double discrete_transmittance(double beta, double depth_m, double d_step) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("discrete_transmittance: beta must be non-negative");
  }
  if (!(depth_m >= 0.0) || !std::isfinite(depth_m)) {
    throw std::invalid_argument("discrete_transmittance: depth must be non-negative");
  }
  if (!(d_step > 0.0)) {
    throw std::invalid_argument("discrete_transmittance: d_step must be positive");
  }
  if (!(beta * d_step < 1.0)) {
    throw std::invalid_argument(
        "discrete_transmittance: beta*d_step must be below 1 "
        "(attenuation per slice must be sub-unity)");
  }
  const SliceConfig cfg(d_step, depth_m, 1);
  const int k = layer_count(depth_m, cfg);
  return pow_int(1.0 - beta * d_step, k);
}

ClearImage homogeneous_discrete(const ClearImage& B, const DepthMap& depth,
                                const HazeParams& hp, double d_step) {
  validate(hp);
  check_dims(B, depth, "homogeneous_discrete");
  if (!(d_step > 0.0) || !std::isfinite(d_step)) {
    throw std::invalid_argument("homogeneous_discrete: d_step must be positive");
  }
  if (!(hp.beta * d_step < 1.0)) {
    throw std::invalid_argument(
        "homogeneous_discrete: beta*d_step must be below 1 "
        "(attenuation per slice must be sub-unity)");
  }

  const SliceConfig cfg(d_step, static_cast<double>(depth.max_depth), 1);
  const double slice_t = 1.0 - hp.beta * d_step;

  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());

  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const int k = layer_count(static_cast<double>(depth.data[px]), cfg);
    const double t = pow_int(slice_t, k);
    const double ambient = hp.A * (1.0 - t);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] =
          store(static_cast<double>(B.data[px * 3 + c]) * t + ambient, nullptr);
    }
  }
  return out;
}

ClearImage legacy_additive(const ClearImage& B, const GrayRaster& S) {
  check_dims(B, S, "legacy_additive");
  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());
  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const double s = static_cast<double>(S.data[px]);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] = store(static_cast<double>(B.data[px * 3 + c]) + s, nullptr);
    }
  }
  return out;
}

ClearImage legacy_multilayer(const ClearImage& B, const std::vector<GrayRaster>& layers) {
  for (const GrayRaster& S : layers) check_dims(B, S, "legacy_multilayer");
  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());
  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    double s = 0.0;
    for (const GrayRaster& S : layers) s += static_cast<double>(S.data[px]);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] = store(static_cast<double>(B.data[px * 3 + c]) + s, nullptr);
    }
  }
  return out;
}

ClearImage legacy_haze_first(const ClearImage& B, const DepthMap& depth,
                             const HazeParams& hp, const GrayRaster& S) {
  validate(hp);
  check_dims(B, depth, "legacy_haze_first");
  check_dims(B, S, "legacy_haze_first");
  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());
  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const double t = std::exp(-hp.beta * static_cast<double>(depth.data[px]));
    const double ambient = hp.A * (1.0 - t);
    const double s = static_cast<double>(S.data[px]);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] =
          store(static_cast<double>(B.data[px * 3 + c]) * t + ambient + s, nullptr);
    }
  }
  return out;
}

ClearImage legacy_rain_first(const ClearImage& B, const DepthMap& depth,
                             const HazeParams& hp, const std::vector<GrayRaster>& layers) {
  validate(hp);
  check_dims(B, depth, "legacy_rain_first");
  for (const GrayRaster& S : layers) check_dims(B, S, "legacy_rain_first");
  ClearImage out;
  out.width = B.width;
  out.height = B.height;
  out.data.resize(B.data.size());
  const std::size_t n = B.pixel_count();
  for (std::size_t px = 0; px < n; ++px) {
    const double t = std::exp(-hp.beta * static_cast<double>(depth.data[px]));
    const double ambient = hp.A * (1.0 - t);
    double s = 0.0;
    for (const GrayRaster& S : layers) s += static_cast<double>(S.data[px]);
    for (int c = 0; c < 3; ++c) {
      out.data[px * 3 + c] = store(
          (static_cast<double>(B.data[px * 3 + c]) + s) * t + ambient, nullptr);
    }
  }
  return out;
}

}  // namespace rainsim
