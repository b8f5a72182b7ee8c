#include "trisplat/train/init.hpp"

#include <cmath>
#include <stdexcept>

#include "trisplat/core/rng.hpp"
#include "trisplat/metrics/chamfer.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

double point_cloud_extent(const std::vector<Vec3>& points) {
    if (points.empty()) return 1.0;
    Vec3 centroid{};
    for (const Vec3& p : points) centroid += p;
    centroid = centroid / static_cast<double>(points.size());
    double r2 = 0.0;
    for (const Vec3& p : points) r2 = std::max(r2, (p - centroid).norm2());
    return std::max(std::sqrt(r2), 1e-9);
}

SceneModel init_from_point_cloud(const std::vector<Vec3>& points, const std::vector<Vec3>& colors,
                                 int sh_degree, double init_scale, double init_opacity,
                                 uint64_t seed) {
    if (points.size() < 2)
        throw std::invalid_argument("init_from_point_cloud: need at least 2 points");
    if (colors.size() != points.size())
        throw std::invalid_argument("init_from_point_cloud: color count mismatch");

    SceneModel scene;
    scene.sh_degree = sh_degree;
    scene.scene_extent = point_cloud_extent(points);
    scene.reserve(points.size());

    const PointGrid grid(points);
    Rng rng(seed);
    const double op_param = unsquash_opacity(init_opacity);
    const int nc = 3 * sh_basis_count(sh_degree);

    for (size_t i = 0; i < points.size(); ++i) {
        const double nn = grid.nearest(points[i], i).second;
        const double radius = std::max(init_scale * nn, 1e-9);
        const Vec3 normal = rng.unit_vector();
        // In-plane frame with a random spin.
        Vec3 seed_axis = std::fabs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 u = normal.cross(seed_axis).normalized();
        const Vec3 v = normal.cross(u);
        const double phi = rng.uniform(0.0, 6.28318530717958647692);

        TrianglePrimitive prim;
        for (int k = 0; k < 3; ++k) {
            const double a = phi + k * (2.0 * 3.14159265358979323846 / 3.0);
            prim.vertices[k] = points[i] + (u * std::cos(a) + v * std::sin(a)) * radius;
        }
        prim.opacity_param = op_param;
        prim.sh.assign(nc, 0.0);
        const Vec3 dc = rgb_to_sh_dc(colors[i]);
        prim.sh[0] = dc.x;
        prim.sh[1] = dc.y;
        prim.sh[2] = dc.z;
        scene.add(prim);
    }
    return scene;
}

}  // namespace trisplat
