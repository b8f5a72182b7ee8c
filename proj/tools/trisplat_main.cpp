// trisplat command-line interface: training, rendering, mesh export,
// evaluation, gradient checking, and synthetic fixture generation.

#include <CLI11.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "trisplat/core/parallel.hpp"
#include "trisplat/io/config.hpp"
#include "trisplat/io/dataset.hpp"
#include "trisplat/io/gltf.hpp"
#include "trisplat/io/ply.hpp"
#include "trisplat/io/png_io.hpp"
#include "trisplat/io/snapshot.hpp"
#include "trisplat/io/synthetic.hpp"
#include "trisplat/kernels/kernels.hpp"
#include "trisplat/losses/photometric.hpp"
#include "trisplat/losses/ssim.hpp"
#include "trisplat/metrics/chamfer.hpp"
#include "trisplat/metrics/psnr.hpp"
#include "trisplat/raster/forward.hpp"
#include "trisplat/train/gradcheck.hpp"
#include "trisplat/train/init.hpp"
#include "trisplat/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace trisplat;

namespace {

Camera load_camera_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("camera spec: cannot open " + path);
    nlohmann::json j;
    in >> j;
    std::array<std::array<double, 4>, 4> m{};
    const auto& tm = j.at("transform_matrix");
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m[r][c] = tm.at(r).at(c).get<double>();
    Camera cam = camera_from_transforms(j.at("camera_angle_x").get<double>(), m,
                                        j.at("width").get<int>(), j.at("height").get<int>());
    cam.validate();
    return cam;
}

Vec3 parse_background(const std::string& s) {
    if (s == "white") return {1, 1, 1};
    if (s == "black" || s.empty()) return {0, 0, 0};
    throw std::runtime_error("background must be 'white' or 'black'");
}

int cmd_train(const std::string& config_path, bool print_defaults, uint64_t seed_override,
              bool has_seed, bool deterministic) {
    if (print_defaults) {
        std::cout << TrainConfig{}.to_config_text();
        return 0;
    }
    TrainConfig cfg = TrainConfig::from_config(ConfigFile::parse_file(config_path));
    if (has_seed) cfg.seed = seed_override;
    if (deterministic) cfg.deterministic = true;
    if (cfg.dataset_dir.empty()) throw std::runtime_error("config: dataset_dir is required");

    PosedImageDataset dataset = load_nerf_synthetic(cfg.dataset_dir, cfg.background);
    SceneModel scene;
    if (!cfg.init_snapshot.empty()) {
        scene = load_snapshot(cfg.init_snapshot);
    } else if (!cfg.init_ply.empty()) {
        const PointCloud pc = load_point_cloud_ply(cfg.init_ply);
        scene = init_from_point_cloud(pc.points, pc.colors, cfg.sh_degree, cfg.init_scale,
                                      cfg.init_opacity, cfg.seed);
    } else {
        throw std::runtime_error("config: init_ply or init_snapshot is required");
    }

    fs::create_directories(cfg.out_dir);
    std::ofstream csv(fs::path(cfg.out_dir) / "metrics.csv");
    TrainResult result = train(dataset, std::move(scene), cfg, &csv, &std::cout);
    save_snapshot(result.scene, (fs::path(cfg.out_dir) / "final.tsnap").string());
    std::cout << "final primitives: " << result.scene.size() << "\n";
    std::cout << "snapshot: " << (fs::path(cfg.out_dir) / "final.tsnap").string() << "\n";
    return 0;
}

int cmd_render(const std::string& snapshot, const std::string& camera_spec,
               const std::string& out_path, const std::string& background) {
    const SceneModel scene = load_snapshot(snapshot);
    const Camera cam = load_camera_spec(camera_spec);
    RenderSettings settings;
    settings.background = parse_background(background);
    const RenderOutput out = render(scene, cam, settings);
    save_png(out.color, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_export_mesh(const std::string& snapshot, const std::string& out_path) {
    const SceneModel scene = load_snapshot(snapshot);
    export_glb(scene, out_path);
    std::cout << "wrote " << out_path << " (" << scene.size() << " faces)\n";
    return 0;
}

int cmd_eval(const std::string& snapshot, const std::string& dataset_dir,
             const std::string& mesh_ref, const std::string& background,
             const std::string& report_path, size_t chamfer_samples) {
    const SceneModel scene = load_snapshot(snapshot);
    const Vec3 bg = parse_background(background);
    const PosedImageDataset dataset = load_nerf_synthetic(dataset_dir, bg);
    const auto& split = dataset.test.empty() ? dataset.train : dataset.test;

    RenderSettings settings;
    settings.background = bg;
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (const PosedImage& view : split) {
        const RenderOutput out = render(scene, view.camera, settings);
        psnr_sum += psnr(out.color, view.image);
        ssim_sum += ssim(out.color, view.image);
    }
    nlohmann::json report;
    report["split"] = dataset.test.empty() ? "train" : "test";
    report["images"] = split.size();
    report["psnr"] = psnr_sum / split.size();
    report["ssim"] = ssim_sum / split.size();
    report["primitives"] = scene.size();
    if (!mesh_ref.empty()) {
        const TriMesh ours = scene_to_mesh(scene);
        const TriMesh ref = import_glb(mesh_ref);
        const ChamferReport cd = chamfer_distance(ours, ref, chamfer_samples);
        report["chamfer"] = {{"mean_symmetric", cd.mean_symmetric},
                             {"mean_a_to_b", cd.mean_a_to_b},
                             {"mean_b_to_a", cd.mean_b_to_a},
                             {"samples_per_mesh", cd.samples_per_mesh}};
    }
    const std::string text = report.dump(2);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
    return 0;
}

int cmd_gradcheck(uint64_t seed, int scenes, bool verbose) {
    const GradCheckReport rep =
        run_gradcheck(seed, scenes, 1e-3, 1e-7, verbose ? &std::cout : nullptr);
    std::cout << "scenes: " << rep.scenes << "  coords: " << rep.coords_checked
              << "  refined: " << rep.refined << "  failed: " << rep.failed << "\n";
    std::cout << "max relative error (accepted): " << rep.max_rel_error << "\n";
    std::cout << "max relative error (pre-refinement): " << rep.max_initial_rel << "\n";
    std::cout << "elapsed: " << rep.elapsed_seconds << " s\n";
    for (const std::string& f : rep.failures) std::cout << "FAIL " << f << "\n";
    std::cout << (rep.pass() ? "gradcheck: PASS" : "gradcheck: FAIL") << "\n";
    return rep.pass() ? 0 : 1;
}

int cmd_make_synthetic(const std::string& spec_path, const std::string& out_dir) {
    const SyntheticSpec spec = SyntheticSpec::from_config(ConfigFile::parse_file(spec_path));
    const SyntheticScene s = make_synthetic_scene(spec);
    save_synthetic_scene(s, out_dir);
    std::cout << "wrote " << out_dir << " (" << s.scene.size() << " primitives, "
              << s.dataset.train.size() << " train / " << s.dataset.test.size()
              << " test views)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trisplat: differentiable 2D triangle splatting"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    bool has_seed = false;
    int threads = 0;
    bool deterministic = false;
    std::string kernel_set = "auto";
    app.add_option("--seed", seed, "Override the random seed")->each([&](const std::string&) {
        has_seed = true;
    });
    app.add_option("--threads", threads, "Worker thread count (0 = hardware)");
    app.add_flag("--deterministic", deterministic, "Bit-reproducible runs for a fixed seed");
    app.add_option("--kernels", kernel_set, "Kernel set: auto, scalar, avx2, neon");

    auto* train_cmd = app.add_subcommand("train", "Optimize a scene from a config file");
    std::string config_path;
    bool print_defaults = false;
    train_cmd->add_option("config", config_path, "TOML-style config file");
    train_cmd->add_flag("--print-defaults", print_defaults, "Print default config and exit");

    auto* render_cmd = app.add_subcommand("render", "Render a snapshot from a camera spec");
    std::string snapshot, camera_spec, out_path, background = "black";
    render_cmd->add_option("snapshot", snapshot)->required();
    render_cmd->add_option("camera", camera_spec)->required();
    render_cmd->add_option("-o,--output", out_path, "Output PNG")->required();
    render_cmd->add_option("--background", background, "black or white");

    auto* export_cmd = app.add_subcommand("export-mesh", "Write the scene as a GLB mesh");
    std::string export_snapshot, export_out;
    export_cmd->add_option("snapshot", export_snapshot)->required();
    export_cmd->add_option("-o,--output", export_out, "Output .glb")->required();

    auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM (and mesh distance) for a snapshot");
    std::string eval_snapshot, eval_dataset, eval_mesh, eval_background = "black", eval_report;
    size_t chamfer_samples = 100000;
    eval_cmd->add_option("snapshot", eval_snapshot)->required();
    eval_cmd->add_option("dataset", eval_dataset)->required();
    eval_cmd->add_option("--mesh", eval_mesh, "Reference GLB for chamfer distance");
    eval_cmd->add_option("--background", eval_background, "black or white");
    eval_cmd->add_option("--chamfer-samples", chamfer_samples);
    eval_cmd->add_option("-o,--output", eval_report, "Write the JSON report here too");

    auto* grad_cmd = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
    int grad_scenes = 50;
    bool grad_verbose = false;
    grad_cmd->add_option("--scenes", grad_scenes, "Number of seeded scenes");
    grad_cmd->add_flag("-v,--verbose", grad_verbose);

    auto* synth_cmd = app.add_subcommand("make-synthetic", "Generate a synthetic dataset");
    std::string synth_spec, synth_out;
    synth_cmd->add_option("spec", synth_spec, "Spec config file")->required();
    synth_cmd->add_option("-o,--output", synth_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) set_worker_threads(threads);
        if (!kernels::set_active_ops(kernel_set))
            throw std::runtime_error("kernel set '" + kernel_set + "' unavailable on this cpu");

        if (train_cmd->parsed()) {
            if (!print_defaults && config_path.empty())
                throw std::runtime_error("train: config file required");
            return cmd_train(config_path, print_defaults, seed, has_seed, deterministic);
        }
        if (render_cmd->parsed()) return cmd_render(snapshot, camera_spec, out_path, background);
        if (export_cmd->parsed()) return cmd_export_mesh(export_snapshot, export_out);
        if (eval_cmd->parsed())
            return cmd_eval(eval_snapshot, eval_dataset, eval_mesh, eval_background, eval_report,
                            chamfer_samples);
        if (grad_cmd->parsed()) return cmd_gradcheck(has_seed ? seed : 1, grad_scenes, grad_verbose);
        if (synth_cmd->parsed()) return cmd_make_synthetic(synth_spec, synth_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
