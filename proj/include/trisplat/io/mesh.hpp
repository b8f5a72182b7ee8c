#pragma once

#include <vector>

#include "trisplat/core/vec.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// Triangle soup with one flat color per face.
struct TriMesh {
    std::vector<Vec3> positions;    // 3 per face
    std::vector<Vec3> face_colors;  // [0,1]

    size_t face_count() const { return face_colors.size(); }
    bool empty() const { return face_colors.empty(); }
};

// Stored (solid) vertices with the degree-0 color of each facelet; higher SH
// coefficients, opacity and the falloff sharpness are dropped.
TriMesh scene_to_mesh(const SceneModel& scene);

}  // namespace trisplat
