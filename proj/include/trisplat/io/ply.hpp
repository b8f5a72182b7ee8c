#pragma once

#include <string>
#include <vector>

#include "trisplat/core/vec.hpp"

namespace trisplat {

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> colors;  // [0,1]; gray when the file has no color
};

// Reads ascii or binary_little_endian PLY with x/y/z (float or double) and
// optional red/green/blue (uchar) vertex properties; other scalar properties
// are skipped.
PointCloud load_point_cloud_ply(const std::string& path);

}  // namespace trisplat
