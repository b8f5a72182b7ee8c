#pragma once

#include <cmath>

#include "trisplat/kernels/backends.hpp"
#include "trisplat/kernels/lane_math.hpp"

namespace trisplat {

// Scalar entry points of the shared lane math. All opacity falloff
// evaluation in the engine goes through these (or their SIMD twins), so
// results are independent of libm and of the active kernel set.
inline double ts_exp(double x) { return kernels::lane_exp<kernels::ScalarBackend>(x); }
inline double ts_log(double x) { return kernels::lane_log<kernels::ScalarBackend>(x); }
inline double ts_pow_pos(double x, double y) {
    return kernels::lane_pow_pos<kernels::ScalarBackend>(x, y);
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double sq(double x) { return x * x; }

inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

inline double deg_to_rad(double d) { return d * (3.14159265358979323846 / 180.0); }

}  // namespace trisplat
