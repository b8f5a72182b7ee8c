#pragma once

#include "trisplat/core/image.hpp"

namespace trisplat {

// Structural similarity with the standard 11x11 Gaussian window (sigma 1.5,
// K1 = 0.01, K2 = 0.03, unit data range), evaluated over the full image with
// reflective padding and averaged over pixels and channels.
//
// If d_a is non-null it receives d(mean SSIM)/d(a).
double ssim(const Image& a, const Image& b, Image* d_a = nullptr);

// Separable Gaussian blur used by the SSIM window (exposed for tests).
Image ssim_blur(const Image& src);
// Adjoint of ssim_blur under reflective padding.
Image ssim_blur_adjoint(const Image& grad);

}  // namespace trisplat
