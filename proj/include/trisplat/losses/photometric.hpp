#pragma once

#include "trisplat/core/image.hpp"

namespace trisplat {

struct LossWeights {
    double l1 = 0.8;
    double ssim = 0.2;
    double normal = 0.05;
    double opacity = 0.01;
};

struct PhotometricParts {
    double l1 = 0.0;
    double ssim_loss = 0.0;  // 1 - SSIM
};

// Elementwise mean absolute error and SSIM loss.
PhotometricParts photometric_loss(const Image& rendered, const Image& ground_truth);

// Same, plus d(w_l1*L1 + w_ssim*(1-SSIM))/d(rendered).
PhotometricParts photometric_loss_backward(const Image& rendered, const Image& ground_truth,
                                           double w_l1, double w_ssim, Image* d_rendered);

double mean_abs_diff(const Image& a, const Image& b);

inline double total_loss(double l1, double ssim_loss, double normal_loss, double opacity_loss,
                         const LossWeights& w) {
    return w.l1 * l1 + w.ssim * ssim_loss + w.normal * normal_loss + w.opacity * opacity_loss;
}

}  // namespace trisplat
