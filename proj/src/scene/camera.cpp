#include "trisplat/scene/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace trisplat {

Camera make_look_at_camera(Vec3 eye, Vec3 target, Vec3 up_hint, int width, int height,
                           double fov_x_rad) {
    Vec3 fwd = (target - eye).normalized();
    if (fwd.norm2() == 0.0) throw std::invalid_argument("look_at: eye == target");
    Vec3 right = fwd.cross(up_hint).normalized();
    if (right.norm2() < 1e-12) {
        // Degenerate up hint; pick any perpendicular.
        Vec3 alt = std::fabs(fwd.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        right = fwd.cross(alt).normalized();
    }
    Vec3 down = fwd.cross(right);  // +y in view space points down
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fov_x = fov_x_rad;
    cam.fov_y = 2.0 * std::atan(std::tan(0.5 * fov_x_rad) * static_cast<double>(height) / width);
    cam.rotation = Mat3{{{right.x, right.y, right.z}, {down.x, down.y, down.z}, {fwd.x, fwd.y, fwd.z}}};
    cam.translation = -(cam.rotation * eye);
    return cam;
}

}  // namespace trisplat
