#pragma once

#include <cstdint>
#include <vector>

#include "trisplat/core/image.hpp"
#include "trisplat/scene/camera.hpp"

namespace trisplat {

inline constexpr double kDepthEps = 1e-6;

// Camera-space normals inferred from a rendered depth image via Scharr
// log-depth gradients.
struct NormalFromDepth {
    Image grad_x, grad_y;  // Scharr depth derivatives (1 channel each)
    Image inferred;        // 3-channel unit normals, zero where invalid
    std::vector<uint8_t> valid;  // depth > kDepthEps and finite direction
};

NormalFromDepth normal_from_depth(const Image& depth, const Camera& cam);

// Mean of (1 - n . n') over masked pixels. Mask entries combine with the
// inference validity; empty mask -> every pixel (validity still applies).
double normal_consistency_loss(const Image& rendered_unit_normal, const NormalFromDepth& nfd,
                               const std::vector<uint8_t>& mask);

// Gradients of the consistency loss wrt the rendered unit normal image and,
// through the inference chain, wrt the depth image.
double normal_consistency_loss_backward(const Image& rendered_unit_normal, const Image& depth,
                                        const Camera& cam, const std::vector<uint8_t>& mask,
                                        Image* d_rendered_unit, Image* d_depth);

// mean(0.25 - (o - 0.5)^2); maximal for undecided opacities.
double opacity_regularization(const std::vector<double>& opacities);
// d/do_i of the mean above.
void opacity_regularization_grad(const std::vector<double>& opacities, double weight,
                                 std::vector<double>& d_opacity);

// Binarizing opacity map with identity gradient estimator.
inline double ste_opacity(double opacity, double threshold) {
    return opacity >= threshold ? 1.0 : 0.0;
}
inline constexpr double kSteGradient = 1.0;  // d ste / d opacity

}  // namespace trisplat
