#pragma once

#include <utility>

#include "trisplat/train/config.hpp"

namespace trisplat {

// 1, 2 or 3 for a global step index.
int stage_of(int step, const TrainConfig& cfg);

// Stage-2 progress in [0, 1]; 0 before stage 2, 1 after.
double stage2_progress(int step, const TrainConfig& cfg);

// Exponential interpolation between gamma_start and gamma_end over stage 2.
double gamma_schedule(int step, const TrainConfig& cfg);

// (T_low, T_high) for the tuning strategy: T_low = end*(e^(k s)-1)/(e^k-1),
// T_high = 1 - T_low; exact endpoints at s = 0 and s = 1.
std::pair<double, double> threshold_schedule(double s, const TrainConfig& cfg);

// Exponential learning-rate decay from lr0 to lr1 over max_steps.
double expon_lr(double lr0, double lr1, int step, int max_steps);

}  // namespace trisplat
