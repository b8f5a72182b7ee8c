#pragma once

#include <functional>

#include "trisplat/raster/backward.hpp"
#include "trisplat/raster/forward.hpp"

namespace trisplat {

using RenderLossFn = std::function<double(const RenderOutput&)>;

// Central finite differences of loss_fn(render(scene)) over every scalar
// parameter. Verification harness only: O(#params) renders.
// h_vertex applies to vertex coordinates, h_other to opacity/SH parameters.
ParamGrads finite_difference_gradients(const SceneModel& scene, const Camera& cam,
                                       const RenderSettings& settings, const RenderLossFn& loss_fn,
                                       double h_vertex, double h_other);

// Re-differences a single flat coordinate (see flatten order below).
double finite_difference_coord(const SceneModel& scene, const Camera& cam,
                               const RenderSettings& settings, const RenderLossFn& loss_fn,
                               size_t flat_index, double h);

// Flat layout: per primitive [9 vertex coords][opacity][sh...].
size_t param_count(const SceneModel& scene);
double get_param(const SceneModel& scene, size_t flat_index);
void set_param(SceneModel& scene, size_t flat_index, double value);
double flatten_grad(const ParamGrads& grads, const SceneModel& scene, size_t flat_index);
bool is_vertex_param(const SceneModel& scene, size_t flat_index);

}  // namespace trisplat
