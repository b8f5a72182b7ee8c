#pragma once

#include "trisplat/core/image.hpp"

namespace trisplat {

inline constexpr double kPsnrCap = 99.0;

double mean_squared_error(const Image& a, const Image& b);

// -10 log10(MSE) for [0,1] images, capped at 99 dB (identical images).
double psnr(const Image& a, const Image& b);

}  // namespace trisplat
