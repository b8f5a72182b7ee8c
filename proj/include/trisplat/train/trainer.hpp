#pragma once

#include <iosfwd>
#include <vector>

#include "trisplat/io/dataset.hpp"
#include "trisplat/scene/scene_model.hpp"
#include "trisplat/train/adam.hpp"
#include "trisplat/train/config.hpp"

namespace trisplat {

struct MetricsRow {
    int iter = 0;
    int stage = 0;
    double gamma = 1.0;
    size_t primitive_count = 0;
    double total = 0.0;
    double l1 = 0.0;
    double ssim_loss = 0.0;
    double normal_loss = 0.0;
    double opacity_loss = 0.0;
    double psnr = 0.0;
};

struct TrainResult {
    SceneModel scene;
    std::vector<MetricsRow> log;
};

// Removes primitives with opacity below t_low, saturates those above t_high
// (opacity parameter set to the squash preimage of 0.9999). Optimizer state
// rows are dropped together with their primitives.
void apply_opacity_tuning(SceneModel& scene, Adam* optimizer, double t_low, double t_high);

// Stage-2/3 boundary: prune below o_thres, pin every survivor to opacity 1.
void enter_stage3(SceneModel& scene, Adam* optimizer, double o_thres);

// Three-stage optimization; one camera per step. Writes one CSV row per
// log_interval into `csv` when given.
TrainResult train(const PosedImageDataset& dataset, SceneModel initial_scene,
                  const TrainConfig& cfg, std::ostream* csv = nullptr,
                  std::ostream* progress = nullptr);

void write_metrics_csv_header(std::ostream& csv);
void write_metrics_csv_row(std::ostream& csv, const MetricsRow& row);

}  // namespace trisplat
