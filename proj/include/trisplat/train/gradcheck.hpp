#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trisplat/scene/camera.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// One seeded random verification scene: a handful of well-separated facelets
// in front of a 32x32 camera with gamma cycling through {1, 3, 10} and the SH
// degree through 0..3.
struct GradCheckScene {
    SceneModel scene;
    Camera camera;
};
GradCheckScene make_gradcheck_scene(uint64_t seed);

struct GradCheckReport {
    int scenes = 0;
    int coords_checked = 0;
    int refined = 0;        // coords accepted after step refinement
    int failed = 0;
    double max_rel_error = 0.0;      // over accepted coordinates
    double max_initial_rel = 0.0;    // before refinement
    double elapsed_seconds = 0.0;
    std::vector<std::string> failures;
    bool pass() const { return failed == 0 && scenes > 0; }
};

// Analytic gradients vs central differences for photometric-L1, depth-sum
// and (raw) normal-sum losses. Primary step h = 1e-4 * scene_extent for
// vertices (1e-4 for other parameters); coordinates failing at the primary
// step are re-differenced at h/100 and h/10000 and must then pass with a
// shrinking discrepancy (min() subgradient kinks make a straddled central
// difference disagree with the one-sided derivative by construction).
GradCheckReport run_gradcheck(uint64_t base_seed, int num_scenes, double tol_rel = 1e-3,
                              double tol_abs = 1e-7, std::ostream* verbose = nullptr);

}  // namespace trisplat
