#include "trisplat/io/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "trisplat/core/rng.hpp"
#include "trisplat/io/config.hpp"
#include "trisplat/io/gltf.hpp"
#include "trisplat/io/snapshot.hpp"
#include "trisplat/raster/forward.hpp"
#include "trisplat/scene/sh.hpp"
#include "trisplat/train/init.hpp"

namespace trisplat {

SyntheticSpec SyntheticSpec::from_config(const ConfigFile& cfg) {
    SyntheticSpec s;
    s.arrangement = cfg.get_string("arrangement", s.arrangement);
    s.primitive_count = cfg.get_int("primitive_count", s.primitive_count);
    s.camera_count = cfg.get_int("camera_count", s.camera_count);
    s.width = cfg.get_int("width", s.width);
    s.height = cfg.get_int("height", s.height);
    s.fov_x_deg = cfg.get_double("fov_x_deg", s.fov_x_deg);
    s.gamma = cfg.get_double("gamma", s.gamma);
    s.seed = static_cast<uint64_t>(cfg.get_double("seed", static_cast<double>(s.seed)));
    s.test_every = cfg.get_int("test_every", s.test_every);
    const std::string bg = cfg.get_string("background", "");
    if (bg == "white") s.background = {1, 1, 1};
    else if (bg == "black") s.background = {0, 0, 0};
    else if (!bg.empty()) s.background = cfg.get_vec3("background", s.background);
    return s;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

void add_triangle(SceneModel& scene, const Vec3 v[3], Vec3 color, double opacity_param) {
    TrianglePrimitive prim;
    for (int k = 0; k < 3; ++k) prim.vertices[k] = v[k];
    prim.opacity_param = opacity_param;
    prim.sh.assign(3, 0.0);
    const Vec3 dc = rgb_to_sh_dc(color);
    prim.sh[0] = dc.x;
    prim.sh[1] = dc.y;
    prim.sh[2] = dc.z;
    scene.add(prim);
}

// Gently bumped height field over [-1,1]^2.
double plate_height(double x, double y) {
    return 0.18 * std::sin(1.7 * x + 0.4) * std::cos(1.4 * y - 0.3) +
           0.07 * std::sin(3.1 * x - 1.1) * std::sin(2.6 * y + 0.8);
}

SceneModel make_plate(int count, Rng& rng, double opacity_param) {
    SceneModel scene;
    scene.sh_degree = 0;
    const int grid = std::max(1, static_cast<int>(std::ceil(std::sqrt(count / 2.0))));
    const double step = 2.0 / grid;
    int emitted = 0;
    for (int gy = 0; gy < grid && emitted < count; ++gy) {
        for (int gx = 0; gx < grid && emitted < count; ++gx) {
            const double x0 = -1.0 + gx * step, x1 = x0 + step;
            const double y0 = -1.0 + gy * step, y1 = y0 + step;
            const Vec3 p00{x0, y0, plate_height(x0, y0)};
            const Vec3 p10{x1, y0, plate_height(x1, y0)};
            const Vec3 p01{x0, y1, plate_height(x0, y1)};
            const Vec3 p11{x1, y1, plate_height(x1, y1)};
            const Vec3 tri_a[3] = {p00, p10, p11};
            const Vec3 tri_b[3] = {p00, p11, p01};
            const Vec3 ca{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
            const Vec3 cb{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
            add_triangle(scene, tri_a, ca, opacity_param);
            ++emitted;
            if (emitted >= count) break;
            add_triangle(scene, tri_b, cb, opacity_param);
            ++emitted;
        }
    }
    return scene;
}

SceneModel make_sphere(int count, Rng& rng, double opacity_param) {
    SceneModel scene;
    scene.sh_degree = 0;
    // Tangent facelets on a unit sphere, sized so neighbors roughly touch.
    const double radius = std::sqrt(4.0 * kPi / count) * 0.8;
    for (int i = 0; i < count; ++i) {
        // Fibonacci sphere directions.
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = i * 2.39996322972865332;
        const Vec3 n{r * std::cos(az), r * std::sin(az), z};
        Vec3 seed_axis = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 u = n.cross(seed_axis).normalized();
        const Vec3 v = n.cross(u);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        Vec3 verts[3];
        for (int k = 0; k < 3; ++k) {
            const double a = phi + k * (2.0 * kPi / 3.0);
            verts[k] = n + (u * std::cos(a) + v * std::sin(a)) * radius;
        }
        const Vec3 color{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
        add_triangle(scene, verts, color, opacity_param);
    }
    return scene;
}

}  // namespace

SyntheticScene make_synthetic_scene(const SyntheticSpec& spec) {
    if (spec.primitive_count < 1) throw std::invalid_argument("synthetic: primitive_count < 1");
    if (spec.camera_count < 1) throw std::invalid_argument("synthetic: camera_count < 1");
    Rng rng(spec.seed);
    const double opacity_param = unsquash_opacity(0.9999);

    SyntheticScene out;
    out.scene = spec.arrangement == "sphere" ? make_sphere(spec.primitive_count, rng, opacity_param)
                                             : make_plate(spec.primitive_count, rng, opacity_param);
    out.scene.gamma = spec.gamma;
    out.scene.scene_extent = point_cloud_extent(out.scene.vertex_data());
    out.dataset.background = spec.background;

    RenderSettings settings;
    settings.background = spec.background;

    const double fov = deg_to_rad(spec.fov_x_deg);
    const double cam_radius = spec.arrangement == "sphere" ? 3.6 : 3.2;
    for (int i = 0; i < spec.camera_count; ++i) {
        double elev_lo = spec.arrangement == "sphere" ? -0.9 : 0.45;  // radians above x-y plane
        double elev_hi = spec.arrangement == "sphere" ? 0.9 : 1.15;
        const double t = spec.camera_count > 1 ? i / static_cast<double>(spec.camera_count - 1) : 0.5;
        const double elev = elev_lo + (elev_hi - elev_lo) * t;
        const double az = i * 2.39996322972865332;
        const Vec3 eye{cam_radius * std::cos(elev) * std::cos(az),
                       cam_radius * std::cos(elev) * std::sin(az), cam_radius * std::sin(elev)};
        PosedImage pi;
        pi.camera = make_look_at_camera(eye, {0, 0, 0}, {0, 0, 1}, spec.width, spec.height, fov);
        pi.image = render(out.scene, pi.camera, settings).color;
        const bool is_test = spec.test_every > 0 && (i % spec.test_every) == spec.test_every - 1;
        pi.name = (is_test ? std::string("test/r_") : std::string("train/r_")) +
                  std::to_string(is_test ? out.dataset.test.size() : out.dataset.train.size());
        (is_test ? out.dataset.test : out.dataset.train).push_back(std::move(pi));
    }
    return out;
}

void save_synthetic_scene(const SyntheticScene& s, const std::string& dir) {
    std::filesystem::create_directories(dir);
    save_transforms_dataset(s.dataset, dir);
    save_snapshot(s.scene, dir + "/gt_scene.tsnap");
    export_glb(s.scene, dir + "/gt_mesh.glb");
}

}  // namespace trisplat
