#pragma once

#include <string>

#include "trisplat/io/mesh.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// Writes the scene as a binary glTF: unindexed triangles (3 unique vertices
// per face), float32 POSITION and normalized uint8 VEC4 COLOR_0 with the
// face color duplicated per vertex. Throws on an empty scene.
void export_glb(const SceneModel& scene, const std::string& path);
void export_glb(const TriMesh& mesh, const std::string& path);

// Minimal reader for colored-triangle GLBs (ours and compatible files):
// decodes POSITION (+ optional indices, optional COLOR_0) into a face soup.
TriMesh import_glb(const std::string& path);

}  // namespace trisplat
