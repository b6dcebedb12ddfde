#include "rainsim/streaks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rainsim/rng.hpp"

namespace rainsim {

void validate(const RainKernelParams& p) {
  if (!(p.length > 0.0) || !std::isfinite(p.length)) {
    throw std::invalid_argument("kernel length must be positive");
  }
  if (!(p.width > 0.0) || !std::isfinite(p.width)) {
    throw std::invalid_argument("kernel width must be positive");
  }
  if (p.width > p.length) {
    throw std::invalid_argument("kernel width must not exceed its length");
  }
  if (!(p.direction_deg >= -90.0 && p.direction_deg <= 90.0)) {
    throw std::invalid_argument("kernel direction must lie in [-90, 90] degrees");
  }
  if (p.length > 4096.0) {
    throw std::invalid_argument("kernel length above 4096 px is not supported");
  }
}

void validate(const StreakProcessParams& p) {
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) {
    throw std::invalid_argument("streak density mu must be non-negative and finite");
  }
  if (p.layer_index < 1) {
    throw std::invalid_argument("layer_index must be at least 1");
  }
}

GrayRaster rasterize_kernel(const RainKernelParams& p) {
  validate(p);
  const int side = static_cast<int>(std::ceil(p.length)) + 2;
  GrayRaster out = GrayRaster::zeros(side, side);

  const double cx = side * 0.5;
  const double cy = side * 0.5;
  const double theta = p.direction_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double half_len = p.length * 0.5;
  const double half_wid = p.width * 0.5;

  float max_v = 0.0f;
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      int inside = 0;
      for (int sy = 0; sy < 4; ++sy) {
        for (int sx = 0; sx < 4; ++sx) {
          const double y = row + (sy + 0.5) / 4.0 - cy;
          const double x = col + (sx + 0.5) / 4.0 - cx;
          // Project onto the segment frame: v along the stroke, u across.
          const double v = x * s + y * c;
          const double u = x * c - y * s;
          if (std::fabs(u) <= half_wid && std::fabs(v) <= half_len) ++inside;
        }
      }
      const float value = static_cast<float>(inside) / 16.0f;
      out.at(row, col) = value;
      if (value > max_v) max_v = value;
    }
  }

  if (max_v == 0.0f) {
    // Sub-texel stroke that slipped between all subsample sites; keep the
    // kernel usable by marking its center.
    out.at(side / 2, side / 2) = 1.0f;
    return out;
  }
  for (float& v : out.data) {
    v = static_cast<float>(static_cast<double>(v) / static_cast<double>(max_v));
  }
  return out;
}

std::vector<StreakPoint> sample_points(const LayerGeometry& geom,
                                       const StreakProcessParams& proc) {
  validate(proc);
  const int w = geom.raster_width();
  const int h = geom.raster_height();
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("sample_points: empty layer raster");
  }

  Rng rng(mix64(proc.seed, static_cast<std::uint64_t>(proc.layer_index)));
  const double mean = proc.mu * static_cast<double>(geom.raster_pixels());
  const std::int64_t count = rng.poisson(mean);

  std::vector<StreakPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    StreakPoint pt;
    pt.row = static_cast<std::int32_t>(rng.below(h));
    pt.col = static_cast<std::int32_t>(rng.below(w));
    points.push_back(pt);
  }
  return points;
}

namespace {

struct KernelSpan {
  int begin = 0;  // first nonzero column in the kernel row
  int end = 0;    // one past the last nonzero column
};

}  // namespace

StreakLayer render_layer(const LayerGeometry& geom, const StreakProcessParams& proc,
                         const RainKernelParams& kern) {
  const GrayRaster kernel = rasterize_kernel(kern);
  std::vector<StreakPoint> points = sample_points(geom, proc);

  // Each distinct raster cell is one unit impulse regardless of how many
  // process points landed on it.
  std::sort(points.begin(), points.end(), [](const StreakPoint& a, const StreakPoint& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const StreakPoint& a, const StreakPoint& b) {
                             return a.row == b.row && a.col == b.col;
                           }),
               points.end());

  const int kside = kernel.width;
  std::vector<KernelSpan> spans(static_cast<std::size_t>(kside));
  for (int kr = 0; kr < kside; ++kr) {
    const float* krow = kernel.data.data() + static_cast<std::size_t>(kr) * kside;
    int b = 0;
    while (b < kside && krow[b] == 0.0f) ++b;
    int e = kside;
    while (e > b && krow[e - 1] == 0.0f) --e;
    spans[static_cast<std::size_t>(kr)] = {b, e};
  }

  StreakLayer layer;
  layer.geometry = geom;
  layer.data = GrayRaster::zeros(geom.raster_width(), geom.raster_height());

  const int w = geom.raster_width();
  const int h = geom.raster_height();
  const int center = kside / 2;

  for (const StreakPoint& pt : points) {
    const int r0 = pt.row - center;
    const int c0 = pt.col - center;
    for (int kr = 0; kr < kside; ++kr) {
      const int rr = r0 + kr;
      if (rr < 0 || rr >= h) continue;
      const KernelSpan span = spans[static_cast<std::size_t>(kr)];
      const int cb = std::max(0, c0 + span.begin);
      const int ce = std::min(w, c0 + span.end);
      if (cb >= ce) continue;
      float* dst = layer.data.data.data() + static_cast<std::size_t>(rr) * w;
      const float* krow = kernel.data.data() + static_cast<std::size_t>(kr) * kside;
      for (int cc = cb; cc < ce; ++cc) dst[cc] += krow[cc - c0];
    }
  }

  for (float& v : layer.data.data) {
    if (v > 1.0f) v = 1.0f;
  }
  return layer;
}

}  // namespace rainsim
