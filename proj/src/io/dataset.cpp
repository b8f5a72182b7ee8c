#include "trisplat/io/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "trisplat/io/png_io.hpp"

namespace trisplat {

namespace fs = std::filesystem;
using nlohmann::json;

Camera camera_from_transforms(double camera_angle_x,
                              const std::array<std::array<double, 4>, 4>& c2w, int width,
                              int height) {
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fov_x = camera_angle_x;
    cam.fov_y = 2.0 * std::atan(std::tan(0.5 * camera_angle_x) * static_cast<double>(height) / width);
    // Columns of the source rotation are the camera axes (right, up, back) in
    // world space; ours wants rows (right, down, forward) of world->view.
    Mat3 r_gl;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r_gl.m[i][j] = c2w[i][j];
    const Vec3 pos{c2w[0][3], c2w[1][3], c2w[2][3]};
    const Mat3 flip{{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
    cam.rotation = flip * r_gl.transposed();
    cam.translation = -(cam.rotation * pos);
    return cam;
}

std::array<std::array<double, 4>, 4> camera_to_transforms(const Camera& cam) {
    const Mat3 flip{{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
    const Mat3 r_c2w = cam.rotation.transposed() * flip;
    const Vec3 pos = cam.position();
    std::array<std::array<double, 4>, 4> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = r_c2w.m[i][j];
        m[i][3] = pos[i];
    }
    m[3] = {0.0, 0.0, 0.0, 1.0};
    return m;
}

Image downscale_image(const Image& src, int factor) {
    if (factor <= 1) return src;
    const int h = src.height() / factor, w = src.width() / factor;
    Image out(h, w, src.channels());
    const double inv = 1.0 / (factor * factor);
    for (int c = 0; c < src.channels(); ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        sum += src.at(c, y * factor + dy, x * factor + dx);
                out.at(c, y, x) = sum * inv;
            }
    return out;
}

namespace {

std::vector<PosedImage> load_split(const std::string& dir, const std::string& split,
                                   Vec3 background, int downscale, bool required) {
    const fs::path jpath = fs::path(dir) / ("transforms_" + split + ".json");
    std::vector<PosedImage> out;
    if (!fs::exists(jpath)) {
        if (required) throw std::runtime_error("dataset: missing " + jpath.string());
        return out;
    }
    std::ifstream in(jpath);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("dataset: cannot parse " + jpath.string() + ": " + e.what());
    }
    const double angle_x = j.at("camera_angle_x").get<double>();
    for (const json& frame : j.at("frames")) {
        std::string file = frame.at("file_path").get<std::string>();
        fs::path img_path = fs::path(dir) / file;
        if (!fs::exists(img_path) && fs::exists(img_path.string() + ".png"))
            img_path = img_path.string() + ".png";
        if (!fs::exists(img_path))
            throw std::runtime_error("dataset: missing image " + img_path.string());
        PosedImage pi;
        pi.name = file;
        pi.image = load_png(img_path.string(), background);
        if (downscale > 1) pi.image = downscale_image(pi.image, downscale);
        std::array<std::array<double, 4>, 4> m{};
        const json& tm = frame.at("transform_matrix");
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m[r][c] = tm.at(r).at(c).get<double>();
        pi.camera = camera_from_transforms(angle_x, m, pi.image.width(), pi.image.height());
        pi.camera.validate();
        out.push_back(std::move(pi));
    }
    return out;
}

json transforms_json(const std::vector<PosedImage>& split) {
    json j;
    j["camera_angle_x"] = split.empty() ? 0.6911112 : split.front().camera.fov_x;
    j["frames"] = json::array();
    for (const PosedImage& pi : split) {
        json frame;
        frame["file_path"] = pi.name;
        const auto m = camera_to_transforms(pi.camera);
        json tm = json::array();
        for (int r = 0; r < 4; ++r) tm.push_back(json::array({m[r][0], m[r][1], m[r][2], m[r][3]}));
        frame["transform_matrix"] = tm;
        j["frames"].push_back(frame);
    }
    return j;
}

}  // namespace

PosedImageDataset load_nerf_synthetic(const std::string& dir, Vec3 background, int downscale) {
    if (!fs::is_directory(dir)) throw std::runtime_error("dataset: not a directory: " + dir);
    PosedImageDataset ds;
    ds.background = background;
    ds.train = load_split(dir, "train", background, downscale, true);
    ds.test = load_split(dir, "test", background, downscale, false);
    if (ds.train.empty()) throw std::runtime_error("dataset: no training images in " + dir);
    return ds;
}

void save_transforms_dataset(const PosedImageDataset& dataset, const std::string& dir) {
    fs::create_directories(fs::path(dir) / "train");
    fs::create_directories(fs::path(dir) / "test");
    auto save_split = [&](const std::vector<PosedImage>& split, const std::string& name) {
        std::ofstream out(fs::path(dir) / ("transforms_" + name + ".json"));
        out << transforms_json(split).dump(2) << "\n";
        for (const PosedImage& pi : split)
            save_png(pi.image, (fs::path(dir) / (pi.name + ".png")).string());
    };
    save_split(dataset.train, "train");
    save_split(dataset.test, "test");
}

}  // namespace trisplat
