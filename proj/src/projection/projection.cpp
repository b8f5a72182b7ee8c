#include "trisplat/projection/projection.hpp"

#include <cmath>

namespace trisplat {

std::optional<std::pair<Vec2, double>> project_point(Vec3 world_point, const Camera& cam) {
    Vec3 v = cam.to_view(world_point);
    if (!(v.z > cam.near_clip)) return std::nullopt;
    const double fx = cam.focal_x(), fy = cam.focal_y();
    Vec2 px{0.5 * cam.width + fx * v.x / v.z, 0.5 * cam.height + fy * v.y / v.z};
    return std::make_pair(px, v.z);
}

void projection_jacobian(Vec3 view_point, const Camera& cam, double jac[2][3]) {
    const double z = view_point.z;
    const double fx = cam.focal_x(), fy = cam.focal_y();
    const double lim_x = kJacobianClipFactor * cam.tan_half_x();
    const double lim_y = kJacobianClipFactor * cam.tan_half_y();
    const double tx = clamp(view_point.x / z, -lim_x, lim_x);
    const double ty = clamp(view_point.y / z, -lim_y, lim_y);
    jac[0][0] = fx / z;
    jac[0][1] = 0.0;
    jac[0][2] = -fx * tx / z;
    jac[1][0] = 0.0;
    jac[1][1] = fy / z;
    jac[1][2] = -fy * ty / z;
}

std::optional<ScreenTriangle> project_triangle(const Vec3 vertices[3], const Camera& cam,
                                               double comp_k, uint32_t primitive_index,
                                               ProjectionCache* cache) {
    const Vec3 center = (vertices[0] + vertices[1] + vertices[2]) / 3.0;
    const Vec3 cv = cam.to_view(center);
    if (!(cv.z > cam.near_clip)) return std::nullopt;

    ScreenTriangle tri;
    tri.primitive_index = primitive_index;
    tri.sort_depth = cv.z;

    const double fx = cam.focal_x(), fy = cam.focal_y();
    tri.c2d = {0.5 * cam.width + fx * cv.x / cv.z, 0.5 * cam.height + fy * cv.y / cv.z};

    double jac[2][3];
    projection_jacobian(cv, cam, jac);

    Vec3 view_offsets[3];
    Vec2 pre[3];
    for (int i = 0; i < 3; ++i) {
        const Vec3 offset = vertices[i] - center;
        view_offsets[i] = (cam.rotation * offset) * comp_k;
        const Vec3& u = view_offsets[i];
        pre[i] = {jac[0][0] * u.x + jac[0][1] * u.y + jac[0][2] * u.z,
                  jac[1][0] * u.x + jac[1][1] * u.y + jac[1][2] * u.z};
        tri.vertex_depths[i] = cv.z + u.z;
    }

    const double area_pre = 0.5 * std::fabs((pre[1] - pre[0]).cross(pre[2] - pre[0]));
    if (!(area_pre >= kDegenerateAreaEps)) return std::nullopt;

    double pre_len[3];
    for (int i = 0; i < 3; ++i) {
        pre_len[i] = pre[i].norm();
        tri.r2d[i] = pre[i] * (1.0 + 0.5 / pre_len[i]);
    }

    Vec3 n = (view_offsets[1] - view_offsets[0]).cross(view_offsets[2] - view_offsets[0]);
    // Two-sided facelets: orient the rendered normal away from the camera so
    // it matches the depth-inferred normal convention.
    const double flip = n.dot(cv) >= 0.0 ? 1.0 : -1.0;
    tri.view_normal = n * flip;

    if (cache) {
        cache->view_center = cv;
        for (int i = 0; i < 3; ++i) {
            cache->view_offsets[i] = view_offsets[i];
            cache->pre_dilation[i] = pre[i];
            cache->pre_len[i] = pre_len[i];
        }
        cache->comp_k = comp_k;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c) cache->jac[r][c] = jac[r][c];
        const double lim_x = kJacobianClipFactor * cam.tan_half_x();
        const double lim_y = kJacobianClipFactor * cam.tan_half_y();
        cache->clip_x_active = std::fabs(cv.x / cv.z) > lim_x;
        cache->clip_y_active = std::fabs(cv.y / cv.z) > lim_y;
        cache->flip_sign = flip;
        const Vec3 to_center = center - cam.position();
        cache->dir_len = to_center.norm();
        cache->color_dir = cache->dir_len > 0.0 ? to_center / cache->dir_len : Vec3{0, 0, 1};
    }
    return tri;
}

void project_triangle_backward(const ScreenTriangle& /*tri*/, const ProjectionCache& cache,
                               const Camera& cam, const PrimScreenGrads& grads, Vec3 d_dir,
                               Vec3 d_vertices[3]) {
    const Vec3 cv = cache.view_center;
    const double z = cv.z;
    const double fx = cam.focal_x(), fy = cam.focal_y();

    // Screen vertices P_i = c2d + r2d_i.
    Vec2 d_c2d = grads.d_screen_vertex[0] + grads.d_screen_vertex[1] + grads.d_screen_vertex[2];

    Vec3 d_cv{};
    Vec3 d_u[3] = {};
    double d_jac[2][3] = {{0, 0, 0}, {0, 0, 0}};

    for (int i = 0; i < 3; ++i) {
        // Dilation: r2d = q * (1 + 0.5/|q|).
        const Vec2 q = cache.pre_dilation[i];
        const double rho = cache.pre_len[i];
        const Vec2 dq_out = grads.d_screen_vertex[i];
        const double qdot = q.dot(dq_out);
        const Vec2 d_q = dq_out * (1.0 + 0.5 / rho) - q * (0.5 / (rho * rho * rho) * qdot);

        // q = J * u.
        const Vec3& u = cache.view_offsets[i];
        d_jac[0][0] += d_q.x * u.x;
        d_jac[0][1] += d_q.x * u.y;
        d_jac[0][2] += d_q.x * u.z;
        d_jac[1][0] += d_q.y * u.x;
        d_jac[1][1] += d_q.y * u.y;
        d_jac[1][2] += d_q.y * u.z;
        d_u[i] += Vec3{cache.jac[0][0] * d_q.x + cache.jac[1][0] * d_q.y,
                       cache.jac[0][1] * d_q.x + cache.jac[1][1] * d_q.y,
                       cache.jac[0][2] * d_q.x + cache.jac[1][2] * d_q.y};

        // Vertex depths d_i = cv.z + u.z.
        d_u[i].z += grads.d_vertex_depth[i];
        d_cv.z += grads.d_vertex_depth[i];
    }

    // Normal n = s * (u1 - u0) x (u2 - u0); the orientation sign is constant.
    {
        const Vec3 g = grads.d_view_normal * cache.flip_sign;
        const Vec3 e1 = cache.view_offsets[1] - cache.view_offsets[0];
        const Vec3 e2 = cache.view_offsets[2] - cache.view_offsets[0];
        const Vec3 d_e1 = e2.cross(g);
        const Vec3 d_e2 = g.cross(e1);
        d_u[0] += -d_e1 - d_e2;
        d_u[1] += d_e1;
        d_u[2] += d_e2;
    }

    // Barycenter projection c2d = (W/2 + fx x/z, H/2 + fy y/z).
    d_cv.x += d_c2d.x * fx / z;
    d_cv.y += d_c2d.y * fy / z;
    d_cv.z += -(d_c2d.x * fx * cv.x + d_c2d.y * fy * cv.y) / (z * z);

    // Jacobian entries: J00 = fx/z, J02 = -fx*tx/z (tx clamped), same for y.
    {
        const double z2 = z * z;
        d_cv.z += d_jac[0][0] * (-fx / z2) + d_jac[1][1] * (-fy / z2);
        const double tx = -cache.jac[0][2] * z / fx;
        const double ty = -cache.jac[1][2] * z / fy;
        if (!cache.clip_x_active) {
            d_cv.x += d_jac[0][2] * (-fx / z2);
            d_cv.z += d_jac[0][2] * (fx * cv.x / (z2 * z));
        }
        d_cv.z += d_jac[0][2] * (fx * tx / z2);
        if (!cache.clip_y_active) {
            d_cv.y += d_jac[1][2] * (-fy / z2);
            d_cv.z += d_jac[1][2] * (fy * cv.y / (z2 * z));
        }
        d_cv.z += d_jac[1][2] * (fy * ty / z2);
    }

    // u_i = k * R * (V_i - C), cv = R*C + t.
    Vec3 d_offsets[3];
    for (int i = 0; i < 3; ++i) d_offsets[i] = cam.rotation.t_mul(d_u[i]) * cache.comp_k;
    Vec3 d_center = cam.rotation.t_mul(d_cv);

    // Color direction dir = (C - campos)/|C - campos|.
    if (d_dir.norm2() > 0.0) {
        const Vec3 dir = cache.color_dir;
        const Vec3 proj = d_dir - dir * dir.dot(d_dir);
        d_center += proj / cache.dir_len;
    }

    // V_i enters through its own offset, minus the mean, plus the barycenter.
    const Vec3 offset_sum = d_offsets[0] + d_offsets[1] + d_offsets[2];
    for (int i = 0; i < 3; ++i)
        d_vertices[i] += d_offsets[i] + (d_center - offset_sum) / 3.0;
}

}  // namespace trisplat
