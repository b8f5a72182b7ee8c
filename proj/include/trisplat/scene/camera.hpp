#pragma once

#include <cmath>
#include <stdexcept>

#include "trisplat/core/vec.hpp"

namespace trisplat {

// Pinhole camera. View space: +z forward, +y down (matching the pixel-grid y
// direction), origin at the optical center. Pixel (i, j) has its center at
// (i + 0.5, j + 0.5); the principal point sits at the image center.
struct Camera {
    int width = 0;
    int height = 0;
    double fov_x = 0.0;  // radians
    double fov_y = 0.0;
    Mat3 rotation;     // world -> view
    Vec3 translation;  // world -> view
    double near_clip = 0.01;

    double tan_half_x() const { return std::tan(0.5 * fov_x); }
    double tan_half_y() const { return std::tan(0.5 * fov_y); }
    // Focal lengths in pixels.
    double focal_x() const { return width / (2.0 * tan_half_x()); }
    double focal_y() const { return height / (2.0 * tan_half_y()); }

    Vec3 to_view(Vec3 world) const { return rotation * world + translation; }
    Vec3 position() const { return -rotation.t_mul(translation); }

    void validate() const {
        if (width < 1 || height < 1) throw std::invalid_argument("camera: image size < 1");
        if (!(fov_x > 0.0 && fov_x < 3.14159265358979) || !(fov_y > 0.0 && fov_y < 3.14159265358979))
            throw std::invalid_argument("camera: fov out of (0, pi)");
        if (rotation.orthonormality_error() > 1e-6)
            throw std::invalid_argument("camera: rotation not orthonormal");
    }

    bool operator==(const Camera& o) const {
        if (width != o.width || height != o.height || fov_x != o.fov_x || fov_y != o.fov_y ||
            near_clip != o.near_clip)
            return false;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (rotation.m[i][j] != o.rotation.m[i][j]) return false;
        return translation == o.translation;
    }
};

// Camera at `eye` looking at `target`, `up_hint` approximately up in world
// space (mapped to -y in view space).
Camera make_look_at_camera(Vec3 eye, Vec3 target, Vec3 up_hint, int width, int height,
                           double fov_x_rad);

}  // namespace trisplat
