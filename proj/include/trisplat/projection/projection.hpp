#pragma once

#include <cstdint>
#include <optional>

#include "trisplat/core/gef.hpp"
#include "trisplat/core/vec.hpp"
#include "trisplat/scene/camera.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

// View-space coordinate ratio clip used when building the projection
// Jacobian, and the degenerate-footprint cull threshold (px^2, pre-dilation).
inline constexpr double kJacobianClipFactor = 1.3;
inline constexpr double kDegenerateAreaEps = 1e-12;

// A triangle after projection: barycenter pixel position plus dilated offset
// vectors; screen vertex i is c2d + r2d[i].
struct ScreenTriangle {
    Vec2 c2d;
    Vec2 r2d[3];
    double vertex_depths[3];
    Vec3 view_normal;   // area-weighted camera-space normal, oriented away from camera
    double sort_depth;  // view depth of the barycenter
    uint32_t primitive_index = 0;

    Vec2 screen_vertex(int i) const { return c2d + r2d[i]; }
};

// Intermediates retained for the backward pass.
struct ProjectionCache {
    Vec3 view_center;
    Vec3 view_offsets[3];  // scaled offsets in view space
    double comp_k = 1.0;
    double jac[2][3];
    bool clip_x_active = false, clip_y_active = false;
    Vec2 pre_dilation[3];
    double pre_len[3];
    double flip_sign = 1.0;
    Vec3 color_dir;  // unit vector, camera position -> barycenter
    double dir_len = 1.0;
};

// Pinhole projection of a world point. Empty when the view depth does not
// clear the near plane (caller culls).
std::optional<std::pair<Vec2, double>> project_point(Vec3 world_point, const Camera& cam);

// 2x3 Jacobian of the pixel projection at a view-space point, with the
// x/z and y/z ratios clamped to +-1.3 * tan(fov/2) before differentiation.
void projection_jacobian(Vec3 view_point, const Camera& cam, double jac[2][3]);

// Full triangle projection: offsets scaled by comp_k about the barycenter in
// 3D, pushed through the local-affine map, then dilated by half a pixel.
// Empty on near-plane or degenerate-area cull.
std::optional<ScreenTriangle> project_triangle(const Vec3 vertices[3], const Camera& cam,
                                               double comp_k, uint32_t primitive_index,
                                               ProjectionCache* cache = nullptr);

// Per-primitive gradients accumulated over all pixels, in screen/view terms.
struct PrimScreenGrads {
    Vec2 d_screen_vertex[3];
    double d_vertex_depth[3] = {0, 0, 0};
    Vec3 d_view_normal;
};

// Pulls screen-space gradients (plus a color-direction gradient from the SH
// chain) back to the three world-space vertices. Adds into d_vertices.
void project_triangle_backward(const ScreenTriangle& tri, const ProjectionCache& cache,
                               const Camera& cam, const PrimScreenGrads& grads, Vec3 d_dir,
                               Vec3 d_vertices[3]);

}  // namespace trisplat
