#include "rainsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rainsim {

namespace {

void check_dims(const ClearImage& a, const ClearImage& b, const char* op) {
  if (!same_size(a, b)) {
    throw std::invalid_argument(std::string(op) + ": image dimensions differ");
  }
}

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
  std::vector<double> w(kWindow);
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i - kRadius);
    w[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filtering: horizontal pass shrinks width by
// kWindow-1, vertical pass shrinks height likewise.
std::vector<double> filter_valid(const std::vector<double>& img, int width, int height,
                                 const std::vector<double>& w) {
  const int fw = width - kWindow + 1;
  const int fh = height - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(fw) * height);
  for (int row = 0; row < height; ++row) {
    const double* src = img.data() + static_cast<std::size_t>(row) * width;
    double* dst = tmp.data() + static_cast<std::size_t>(row) * fw;
    for (int col = 0; col < fw; ++col) {
      double acc = 0.0;
      for (int j = 0; j < kWindow; ++j) acc += w[static_cast<std::size_t>(j)] * src[col + j];
      dst[col] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(fw) * fh);
  for (int row = 0; row < fh; ++row) {
    double* dst = out.data() + static_cast<std::size_t>(row) * fw;
    for (int col = 0; col < fw; ++col) {
      double acc = 0.0;
      for (int j = 0; j < kWindow; ++j) {
        acc += w[static_cast<std::size_t>(j)] * tmp[static_cast<std::size_t>(row + j) * fw + col];
      }
      dst[col] = acc;
    }
  }
  return out;
}

std::vector<double> luma(const ClearImage& img) {
  std::vector<double> out(img.pixel_count());
  for (std::size_t px = 0; px < out.size(); ++px) {
    out[px] = (static_cast<double>(img.data[px * 3 + 0]) +
               static_cast<double>(img.data[px * 3 + 1]) +
               static_cast<double>(img.data[px * 3 + 2])) /
              3.0;
  }
  return out;
}

}  // namespace

double psnr(const ClearImage& a, const ClearImage& b) {
  check_dims(a, b, "psnr");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse == 0.0) return 100.0;
  return std::min(10.0 * std::log10(1.0 / mse), 100.0);
}

double ssim(const ClearImage& a, const ClearImage& b) {
  check_dims(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow) {
    throw std::invalid_argument("ssim: image must be at least 11x11");
  }

  const int width = a.width;
  const int height = a.height;
  const std::vector<double> w = gaussian_window();

  const std::vector<double> x = luma(a);
  const std::vector<double> y = luma(b);

  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }

  const std::vector<double> mu_x = filter_valid(x, width, height, w);
  const std::vector<double> mu_y = filter_valid(y, width, height, w);
  const std::vector<double> f_xx = filter_valid(xx, width, height, w);
  const std::vector<double> f_yy = filter_valid(yy, width, height, w);
  const std::vector<double> f_xy = filter_valid(xy, width, height, w);

  double sum = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = f_xx[i] - mx * mx;
    const double var_y = f_yy[i] - my * my;
    const double cov = f_xy[i] - mx * my;
    const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
    const double den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
    sum += num / den;
  }
  return sum / static_cast<double>(mu_x.size());
}

}  // namespace rainsim
