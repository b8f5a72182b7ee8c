#include "trisplat/train/schedules.hpp"

#include <cmath>

#include "trisplat/core/math.hpp"

namespace trisplat {

int stage_of(int step, const TrainConfig& cfg) {
    if (step < cfg.stage1_iters) return 1;
    if (step < cfg.stage1_iters + cfg.stage2_iters) return 2;
    return 3;
}

double stage2_progress(int step, const TrainConfig& cfg) {
    if (cfg.stage2_iters <= 0) return step < cfg.stage1_iters ? 0.0 : 1.0;
    const double s = (step - cfg.stage1_iters) / static_cast<double>(cfg.stage2_iters);
    return clamp(s, 0.0, 1.0);
}

double gamma_schedule(int step, const TrainConfig& cfg) {
    const double s = stage2_progress(step, cfg);
    return std::exp(lerp(std::log(cfg.gamma_start), std::log(cfg.gamma_end), s));
}

std::pair<double, double> threshold_schedule(double s, const TrainConfig& cfg) {
    const double k = cfg.schedule_sharpness;
    const double ramp = k != 0.0 ? (std::exp(k * s) - 1.0) / (std::exp(k) - 1.0) : s;
    const double t_low = cfg.t_low_end * ramp;
    const double t_high = 1.0 - (1.0 - cfg.t_high_end) * ramp;
    return {t_low, t_high};
}

double expon_lr(double lr0, double lr1, int step, int max_steps) {
    if (max_steps <= 0) return lr1;
    const double t = clamp(step / static_cast<double>(max_steps), 0.0, 1.0);
    return std::exp(lerp(std::log(lr0), std::log(lr1), t));
}

}  // namespace trisplat
