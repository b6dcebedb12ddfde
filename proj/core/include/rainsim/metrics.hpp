#pragma once
// Full-reference quality metrics on [0,1]-scaled images.

#include "rainsim/raster.hpp"

namespace rainsim {

// 10*log10(1/MSE) in dB over all pixels and channels; identical images
// report the cap value of 100 dB and no result exceeds it.
double psnr(const ClearImage& a, const ClearImage& b);

// Mean local SSIM on the channel-average luma: 11x11 Gaussian window with
// sigma 1.5, stabilizers (0.01)^2 and (0.03)^2, valid-mode filtering (no
// padding). Requires both sides of the image to be at least 11 px.
double ssim(const ClearImage& a, const ClearImage& b);

}  // namespace rainsim
