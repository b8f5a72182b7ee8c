#pragma once

#include <string>

#include "trisplat/core/image.hpp"
#include "trisplat/core/vec.hpp"

namespace trisplat {

// 8-bit PNG -> linear-as-stored [0,1] planar RGB; alpha (if present) is
// composited over `background`.
Image load_png(const std::string& path, Vec3 background);

// Clamps to [0,1] and writes 8-bit RGB.
void save_png(const Image& image, const std::string& path);

}  // namespace trisplat
