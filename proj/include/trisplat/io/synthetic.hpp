#pragma once

#include <cstdint>
#include <string>

#include "trisplat/io/dataset.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

struct SyntheticSpec {
    std::string arrangement = "plate";  // "plate" | "sphere"
    int primitive_count = 200;
    int camera_count = 30;
    int width = 128;
    int height = 128;
    double fov_x_deg = 45.0;
    double gamma = 50.0;
    uint64_t seed = 1;
    int test_every = 6;  // every Nth camera goes to the test split
    Vec3 background{0, 0, 0};

    static SyntheticSpec from_config(const class ConfigFile& cfg);
};

struct SyntheticScene {
    SceneModel scene;  // ground truth (solid opacities, sh degree 0)
    PosedImageDataset dataset;
};

// Deterministic ground-truth scene plus a dataset rendered from it with the
// engine's own forward pass.
SyntheticScene make_synthetic_scene(const SyntheticSpec& spec);

// Writes images + transforms jsons + ground-truth snapshot and mesh.
void save_synthetic_scene(const SyntheticScene& s, const std::string& dir);

}  // namespace trisplat
