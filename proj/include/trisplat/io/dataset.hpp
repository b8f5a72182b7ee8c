#pragma once

#include <array>
#include <string>
#include <vector>

#include "trisplat/core/image.hpp"
#include "trisplat/scene/camera.hpp"

namespace trisplat {

struct PosedImage {
    Image image;  // linear-as-stored [0,1] RGB
    Camera camera;
    std::string name;
};

struct PosedImageDataset {
    std::vector<PosedImage> train;
    std::vector<PosedImage> test;
    Vec3 background{0, 0, 0};
};

// Converts a transforms-style camera (x-right / y-up / z-backward
// camera-to-world matrix) into the renderer's +z-forward, y-down view
// convention.
Camera camera_from_transforms(double camera_angle_x,
                              const std::array<std::array<double, 4>, 4>& c2w, int width,
                              int height);

// Inverse of the conversion above (for writing transforms files).
std::array<std::array<double, 4>, 4> camera_to_transforms(const Camera& cam);

// Loads a directory with transforms_train.json / transforms_test.json and
// image files; RGBA images are composited over `background`.
// downscale must be a positive integer factor (1 = native resolution).
PosedImageDataset load_nerf_synthetic(const std::string& dir, Vec3 background, int downscale = 1);

// Box-average downsample by an integer factor.
Image downscale_image(const Image& src, int factor);

// Writes a dataset in the same transforms format (PNG images + json).
void save_transforms_dataset(const PosedImageDataset& dataset, const std::string& dir);

}  // namespace trisplat
