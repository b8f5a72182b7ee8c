#include "trisplat/train/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trisplat/core/rng.hpp"
#include "trisplat/io/snapshot.hpp"
#include "trisplat/losses/normal_depth.hpp"
#include "trisplat/losses/photometric.hpp"
#include "trisplat/metrics/psnr.hpp"
#include "trisplat/raster/backward.hpp"
#include "trisplat/raster/forward.hpp"
#include "trisplat/train/schedules.hpp"

namespace trisplat {

TrainConfig TrainConfig::from_config(const ConfigFile& cfg) {
    TrainConfig c;
    c.stage1_iters = cfg.get_int("stage1_iters", c.stage1_iters);
    c.stage2_iters = cfg.get_int("stage2_iters", c.stage2_iters);
    c.stage3_iters = cfg.get_int("stage3_iters", c.stage3_iters);
    c.gamma_start = cfg.get_double("gamma_start", c.gamma_start);
    c.gamma_end = cfg.get_double("gamma_end", c.gamma_end);
    const std::string strategy = cfg.get_string("opacity_mode", "tuning");
    if (strategy == "tuning")
        c.opacity_strategy = OpacityStrategy::kTuning;
    else if (strategy == "ste")
        c.opacity_strategy = OpacityStrategy::kSte;
    else
        throw std::runtime_error("config: opacity_mode must be 'tuning' or 'ste'");
    c.t_low_end = cfg.get_double("t_low_end", c.t_low_end);
    c.t_high_end = cfg.get_double("t_high_end", c.t_high_end);
    c.o_thres = cfg.get_double("o_thres", c.o_thres);
    c.schedule_sharpness = cfg.get_double("schedule_sharpness", c.schedule_sharpness);
    c.tuning_interval = cfg.get_int("tuning_interval", c.tuning_interval);
    c.lr_vertices_init = cfg.get_double("lr_vertices_init", c.lr_vertices_init);
    c.lr_vertices_final = cfg.get_double("lr_vertices_final", c.lr_vertices_final);
    c.lr_opacity = cfg.get_double("lr_opacity", c.lr_opacity);
    c.lr_sh_dc = cfg.get_double("lr_sh_dc", c.lr_sh_dc);
    c.lr_sh_rest = cfg.get_double("lr_sh_rest", c.lr_sh_rest);
    c.weights.l1 = cfg.get_double("lambda_l1", c.weights.l1);
    c.weights.ssim = cfg.get_double("lambda_ssim", c.weights.ssim);
    c.weights.normal = cfg.get_double("lambda_n", c.weights.normal);
    c.weights.opacity = cfg.get_double("lambda_o", c.weights.opacity);
    c.use_normal_loss = cfg.get_bool("use_normal_loss", c.use_normal_loss);
    c.sh_degree = cfg.get_int("sh_degree", c.sh_degree);
    const std::string bg = cfg.get_string("background", "");
    if (bg == "white")
        c.background = {1, 1, 1};
    else if (bg == "black")
        c.background = {0, 0, 0};
    else if (!bg.empty())
        c.background = cfg.get_vec3("background", c.background);
    c.seed = static_cast<uint64_t>(cfg.get_double("seed", static_cast<double>(c.seed)));
    c.deterministic = cfg.get_bool("deterministic", c.deterministic);
    c.init_opacity = cfg.get_double("init_opacity", c.init_opacity);
    c.init_scale = cfg.get_double("init_scale", c.init_scale);
    c.log_interval = cfg.get_int("log_interval", c.log_interval);
    c.snapshot_interval = cfg.get_int("snapshot_interval", c.snapshot_interval);
    c.dataset_dir = cfg.get_string("dataset_dir", c.dataset_dir);
    c.init_ply = cfg.get_string("init_ply", c.init_ply);
    c.init_snapshot = cfg.get_string("init_snapshot", c.init_snapshot);
    c.out_dir = cfg.get_string("out_dir", c.out_dir);
    if (c.stage1_iters < 0 || c.stage2_iters < 0 || c.stage3_iters < 0)
        throw std::runtime_error("config: stage iteration counts must be >= 0");
    if (!(c.gamma_end >= c.gamma_start && c.gamma_start >= 1.0))
        throw std::runtime_error("config: need gamma_end >= gamma_start >= 1");
    return c;
}

std::string TrainConfig::to_config_text() const {
    std::ostringstream o;
    o << "# trisplat training configuration (defaults)\n";
    o << "dataset_dir = \"" << dataset_dir << "\"\n";
    o << "init_ply = \"" << init_ply << "\"\n";
    o << "init_snapshot = \"" << init_snapshot << "\"\n";
    o << "out_dir = \"" << out_dir << "\"\n";
    o << "stage1_iters = " << stage1_iters << "\n";
    o << "stage2_iters = " << stage2_iters << "\n";
    o << "stage3_iters = " << stage3_iters << "\n";
    o << "gamma_start = " << gamma_start << "\n";
    o << "gamma_end = " << gamma_end << "\n";
    o << "opacity_mode = \""
      << (opacity_strategy == OpacityStrategy::kTuning ? "tuning" : "ste") << "\"\n";
    o << "t_low_end = " << t_low_end << "\n";
    o << "t_high_end = " << t_high_end << "\n";
    o << "o_thres = " << o_thres << "\n";
    o << "schedule_sharpness = " << schedule_sharpness << "\n";
    o << "tuning_interval = " << tuning_interval << "\n";
    o << "lr_vertices_init = " << lr_vertices_init << "\n";
    o << "lr_vertices_final = " << lr_vertices_final << "\n";
    o << "lr_opacity = " << lr_opacity << "\n";
    o << "lr_sh_dc = " << lr_sh_dc << "\n";
    o << "lr_sh_rest = " << lr_sh_rest << "\n";
    o << "lambda_l1 = " << weights.l1 << "\n";
    o << "lambda_ssim = " << weights.ssim << "\n";
    o << "lambda_n = " << weights.normal << "\n";
    o << "lambda_o = " << weights.opacity << "\n";
    o << "use_normal_loss = " << (use_normal_loss ? "true" : "false") << "\n";
    o << "sh_degree = " << sh_degree << "\n";
    o << "background = \"black\"\n";
    o << "seed = " << seed << "\n";
    o << "deterministic = " << (deterministic ? "true" : "false") << "\n";
    o << "init_opacity = " << init_opacity << "\n";
    o << "init_scale = " << init_scale << "\n";
    o << "log_interval = " << log_interval << "\n";
    o << "snapshot_interval = " << snapshot_interval << "\n";
    return o.str();
}

namespace {

constexpr double kSaturatedOpacity = 0.9999;

std::vector<uint8_t> prune_mask(const SceneModel& scene, double t_low) {
    std::vector<uint8_t> keep(scene.size(), 1);
    for (size_t i = 0; i < scene.size(); ++i)
        if (scene.opacity(i) < t_low) keep[i] = 0;
    return keep;
}

void apply_keep(SceneModel& scene, Adam* optimizer, const std::vector<uint8_t>& keep) {
    const int nc = scene.sh_coeffs_per_prim();
    bool any_drop = false;
    for (uint8_t k : keep)
        if (!k) {
            any_drop = true;
            break;
        }
    if (!any_drop) return;
    scene.keep(keep);
    if (optimizer) optimizer->keep(keep, nc);
}

}  // namespace

void apply_opacity_tuning(SceneModel& scene, Adam* optimizer, double t_low, double t_high) {
    apply_keep(scene, optimizer, prune_mask(scene, t_low));
    const double pinned = unsquash_opacity(kSaturatedOpacity);
    for (size_t i = 0; i < scene.size(); ++i)
        if (scene.opacity(i) > t_high) scene.opacity_param(i) = pinned;
}

void enter_stage3(SceneModel& scene, Adam* optimizer, double o_thres) {
    apply_keep(scene, optimizer, prune_mask(scene, o_thres));
    const double pinned = unsquash_opacity(kSaturatedOpacity);
    for (size_t i = 0; i < scene.size(); ++i) scene.opacity_param(i) = pinned;
    if (optimizer) optimizer->reset_opacity_state();
}

void write_metrics_csv_header(std::ostream& csv) {
    csv << "iter,stage,gamma,primitives,total,l1,ssim_loss,normal_loss,opacity_loss,psnr\n";
}

void write_metrics_csv_row(std::ostream& csv, const MetricsRow& r) {
    csv.precision(10);
    csv << r.iter << ',' << r.stage << ',' << r.gamma << ',' << r.primitive_count << ',' << r.total
        << ',' << r.l1 << ',' << r.ssim_loss << ',' << r.normal_loss << ',' << r.opacity_loss
        << ',' << r.psnr << '\n';
}

TrainResult train(const PosedImageDataset& dataset, SceneModel scene, const TrainConfig& cfg,
                  std::ostream* csv, std::ostream* progress) {
    if (dataset.train.empty()) throw std::invalid_argument("train: dataset has no images");
    if (scene.empty()) throw std::invalid_argument("train: empty initial scene");

    TrainResult result;
    Adam optimizer(scene);
    Rng rng(cfg.seed);
    if (csv) write_metrics_csv_header(*csv);

    const int total = cfg.total_iters();
    std::vector<size_t> order(dataset.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    size_t order_pos = order.size();  // trigger initial shuffle

    bool opacity_frozen = false;
    const bool use_snapshot_dir = cfg.snapshot_interval > 0 && !cfg.out_dir.empty();
    if (use_snapshot_dir) std::filesystem::create_directories(cfg.out_dir);

    for (int step = 0; step < total; ++step) {
        const int stage = stage_of(step, cfg);
        // Stage boundary maintenance before the step runs.
        if (stage == 3 && !opacity_frozen) {
            enter_stage3(scene, &optimizer, cfg.o_thres);
            opacity_frozen = true;
            if (scene.empty()) throw std::runtime_error("train: every primitive was pruned");
        }
        scene.gamma = stage == 3 ? cfg.gamma_end : gamma_schedule(step, cfg);

        if (order_pos >= order.size()) {
            rng.shuffle(order);
            order_pos = 0;
        }
        const PosedImage& view = dataset.train[order[order_pos++]];

        RenderSettings settings;
        settings.background = dataset.background;
        settings.training = true;
        settings.opacity_mode = (stage == 2 && cfg.opacity_strategy == OpacityStrategy::kSte)
                                    ? OpacityMode::kSte
                                    : OpacityMode::kSigmoid;
        settings.ste_threshold = cfg.o_thres;

        FrameRecords records;
        RenderOutput out = render(scene, view.camera, settings, &records);

        PixelGrads pg;
        const PhotometricParts parts = photometric_loss_backward(
            out.color, view.image, cfg.weights.l1, cfg.weights.ssim, &pg.color);

        double normal_loss = 0.0;
        if (cfg.use_normal_loss && cfg.weights.normal > 0.0) {
            std::vector<uint8_t> mask(out.alpha.pixel_count());
            for (size_t i = 0; i < mask.size(); ++i) mask[i] = out.alpha.data()[i] >= 0.5;
            Image d_unit, d_depth;
            normal_loss = normal_consistency_loss_backward(out.normal, out.depth, view.camera,
                                                           mask, &d_unit, &d_depth);
            for (size_t i = 0; i < d_unit.size(); ++i) d_unit.data()[i] *= cfg.weights.normal;
            for (size_t i = 0; i < d_depth.size(); ++i) d_depth.data()[i] *= cfg.weights.normal;
            pg.normal_raw = normalize_backward(out.normal_raw, d_unit);
            pg.depth = std::move(d_depth);
        }

        ParamGrads grads = render_backward(scene, records, pg);

        double opacity_loss = 0.0;
        if (stage == 1 && cfg.weights.opacity > 0.0) {
            std::vector<double> opacities(scene.size());
            for (size_t i = 0; i < scene.size(); ++i) opacities[i] = scene.opacity(i);
            opacity_loss = opacity_regularization(opacities);
            std::vector<double> d_op(scene.size(), 0.0);
            opacity_regularization_grad(opacities, cfg.weights.opacity, d_op);
            for (size_t i = 0; i < scene.size(); ++i)
                grads.d_opacity_param[i] += d_op[i] * opacities[i] * (1.0 - opacities[i]);
        }

        AdamRates rates;
        rates.vertices = scene.scene_extent * expon_lr(cfg.lr_vertices_init, cfg.lr_vertices_final,
                                                       step, total);
        rates.opacity = opacity_frozen ? 0.0 : cfg.lr_opacity;
        rates.sh_dc = cfg.lr_sh_dc;
        rates.sh_rest = cfg.lr_sh_rest;
        optimizer.step(scene, grads, rates);

        // Periodic prune/clip for the tuning strategy inside stage 2.
        if (stage == 2 && cfg.opacity_strategy == OpacityStrategy::kTuning) {
            const int k = step - cfg.stage1_iters;
            if (k > 0 && cfg.tuning_interval > 0 && k % cfg.tuning_interval == 0) {
                const auto [t_low, t_high] = threshold_schedule(stage2_progress(step, cfg), cfg);
                apply_opacity_tuning(scene, &optimizer, t_low, t_high);
                if (scene.empty()) throw std::runtime_error("train: every primitive was pruned");
            }
        }

        if (cfg.log_interval > 0 && (step % cfg.log_interval == 0 || step + 1 == total)) {
            MetricsRow row;
            row.iter = step;
            row.stage = stage;
            row.gamma = scene.gamma;
            row.primitive_count = scene.size();
            row.l1 = parts.l1;
            row.ssim_loss = parts.ssim_loss;
            row.normal_loss = normal_loss;
            row.opacity_loss = opacity_loss;
            row.total = total_loss(parts.l1, parts.ssim_loss, normal_loss, opacity_loss,
                                   LossWeights{cfg.weights.l1, cfg.weights.ssim,
                                               cfg.use_normal_loss ? cfg.weights.normal : 0.0,
                                               stage == 1 ? cfg.weights.opacity : 0.0});
            row.psnr = psnr(out.color, view.image);
            result.log.push_back(row);
            if (csv) write_metrics_csv_row(*csv, row);
            if (progress)
                (*progress) << "iter " << step << " stage " << stage << " gamma " << scene.gamma
                            << " prims " << scene.size() << " loss " << row.total << " psnr "
                            << row.psnr << "\n";
        }
        if (use_snapshot_dir && cfg.snapshot_interval > 0 && step > 0 &&
            step % cfg.snapshot_interval == 0) {
            std::ostringstream name;
            name << cfg.out_dir << "/snapshot_" << step << ".tsnap";
            save_snapshot(scene, name.str());
        }
    }

    // A zero-length run returns the scene untouched.
    if (total > 0 && !opacity_frozen && cfg.stage3_iters == 0 &&
        stage_of(total - 1, cfg) == 2) {
        // Training that ends with stage 2 still converges opacities.
        enter_stage3(scene, &optimizer, cfg.o_thres);
    }

    result.scene = std::move(scene);
    return result;
}

}  // namespace trisplat
