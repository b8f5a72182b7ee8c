#pragma once

#include <string>

#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// Versioned binary container for the full scene state; load(save(x)) == x
// bit-exactly.
void save_snapshot(const SceneModel& scene, const std::string& path);
SceneModel load_snapshot(const std::string& path);

}  // namespace trisplat
