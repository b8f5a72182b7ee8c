#pragma once

#include "trisplat/core/vec.hpp"

namespace trisplat {

enum class OpacityMode {
    kSigmoid,  // O = sigmoid(opacity_param)
    kSte,      // O binarized at ste_threshold, identity gradient estimator
};

struct RenderSettings {
    Vec3 background{0.0, 0.0, 0.0};
    bool training = false;        // retain per-pixel shading records
    int active_sh_degree = -1;    // -1: use the scene's degree
    int tile_size = 16;
    // Contributions below this opacity are skipped; also sets the level-set
    // reach used for tile binning.
    double min_contrib_opacity = 1.0 / 255.0;
    // Per-contribution opacity clamp keeping transmittance strictly positive.
    double max_contrib_opacity = 0.99;
    // Front-to-back blending stops once transmittance drops below this
    // (<= 0 disables early termination).
    double termination_transmittance = 1e-4;
    bool scale_compensation = true;
    OpacityMode opacity_mode = OpacityMode::kSigmoid;
    double ste_threshold = 0.5;

    bool operator==(const RenderSettings&) const = default;
};

}  // namespace trisplat
