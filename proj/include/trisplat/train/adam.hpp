#pragma once

#include <cstdint>
#include <vector>

#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

struct AdamRates {
    double vertices = 0.0;
    double opacity = 0.0;
    double sh_dc = 0.0;
    double sh_rest = 0.0;
};

// Adam over the three parameter groups of a scene. Pruning drops state rows
// together with their primitives.
class Adam {
public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-15;

    explicit Adam(const SceneModel& scene);

    void step(SceneModel& scene, const ParamGrads& grads, const AdamRates& rates);

    // Keep state rows whose mask entry is true (aligned with scene pruning).
    void keep(const std::vector<uint8_t>& mask, int sh_coeffs_per_prim);

    // Clears first/second moments of the opacity group (used when opacities
    // are pinned externally).
    void reset_opacity_state();

    int64_t steps_taken() const { return t_; }

private:
    std::vector<double> m_vert_, v_vert_;
    std::vector<double> m_op_, v_op_;
    std::vector<double> m_sh_, v_sh_;
    int64_t t_ = 0;
};

}  // namespace trisplat
