#pragma once

#include <cstdint>
#include <vector>

#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// One equilateral facelet per point: centered on the point, lying in the
// plane of a uniformly random normal with random in-plane spin, sized by the
// nearest-neighbor distance; DC color reproduces the point color. Throws
// below 2 points.
SceneModel init_from_point_cloud(const std::vector<Vec3>& points, const std::vector<Vec3>& colors,
                                 int sh_degree, double init_scale, double init_opacity,
                                 uint64_t seed);

// Bounding-sphere radius about the centroid.
double point_cloud_extent(const std::vector<Vec3>& points);

}  // namespace trisplat
