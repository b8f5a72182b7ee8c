#pragma once

#include <cstdint>
#include <vector>

#include "trisplat/core/vec.hpp"
#include "trisplat/io/mesh.hpp"

namespace trisplat {

struct ChamferReport {
    double mean_symmetric = 0.0;  // average of the two directional means
    double mean_a_to_b = 0.0;
    double mean_b_to_a = 0.0;
    size_t samples_per_mesh = 0;
};

// Area-uniform random surface samples on a mesh.
std::vector<Vec3> sample_mesh_surface(const TriMesh& mesh, size_t samples, uint64_t seed);

// Exact nearest-neighbor grid over a fixed point set.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec3>& points);
    // Index of the nearest point and its distance; points must be non-empty.
    // `exclude` skips one index (self-queries within the indexed set).
    std::pair<size_t, double> nearest(Vec3 query, size_t exclude = SIZE_MAX) const;

private:
    std::vector<Vec3> points_;
    std::vector<uint32_t> cell_start_;
    std::vector<uint32_t> order_;
    Vec3 origin_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    size_t cell_index(int cx, int cy, int cz) const {
        return (static_cast<size_t>(cz) * ny_ + cy) * nx_ + cx;
    }
};

// Sample-to-nearest-sample Euclidean mean, both directions.
ChamferReport chamfer_distance(const TriMesh& a, const TriMesh& b, size_t samples_per_mesh,
                               uint64_t seed = 1234);

}  // namespace trisplat
