#pragma once

#include <cstdint>
#include <string>

#include "trisplat/io/config.hpp"
#include "trisplat/losses/photometric.hpp"
#include "trisplat/raster/settings.hpp"

namespace trisplat {

enum class OpacityStrategy { kTuning, kSte };

struct TrainConfig {
    // Stage lengths: polarize / solidify / fine-tune.
    int stage1_iters = 2000;
    int stage2_iters = 2000;
    int stage3_iters = 2000;

    double gamma_start = 1.0;
    double gamma_end = 50.0;
    OpacityStrategy opacity_strategy = OpacityStrategy::kTuning;
    double t_low_end = 0.5;
    double t_high_end = 0.5;
    double o_thres = 0.5;
    double schedule_sharpness = 3.0;  // exponential threshold interpolation
    int tuning_interval = 500;

    // Learning rates; vertex rates are multiplied by scene_extent and decay
    // exponentially from init to final over the whole run.
    double lr_vertices_init = 1.6e-4;
    double lr_vertices_final = 1.6e-6;
    double lr_opacity = 0.05;
    double lr_sh_dc = 2.5e-3;
    double lr_sh_rest = 1.25e-4;

    LossWeights weights;  // l1 0.8, ssim 0.2, normal 0.05, opacity 0.01
    bool use_normal_loss = false;

    int sh_degree = 0;
    Vec3 background{0, 0, 0};
    uint64_t seed = 0;
    bool deterministic = false;

    // Initialization.
    double init_opacity = 0.1;
    double init_scale = 1.0;  // triangle radius = init_scale * NN distance

    int log_interval = 100;
    int snapshot_interval = 0;  // 0 disables periodic snapshots

    std::string dataset_dir;
    std::string init_ply;
    std::string init_snapshot;
    std::string out_dir = "out";

    int total_iters() const { return stage1_iters + stage2_iters + stage3_iters; }

    static TrainConfig from_config(const ConfigFile& cfg);
    std::string to_config_text() const;
};

}  // namespace trisplat
