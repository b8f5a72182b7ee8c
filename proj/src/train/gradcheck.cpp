#include "trisplat/train/gradcheck.hpp"

#include <chrono>
#include <memory>
#include <cmath>
#include <ostream>
#include <sstream>

#include "trisplat/core/rng.hpp"
#include "trisplat/raster/backward.hpp"
#include "trisplat/raster/fd_oracle.hpp"
#include "trisplat/raster/forward.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

GradCheckScene make_gradcheck_scene(uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ull + 1);
    GradCheckScene out;
    out.camera.width = 32;
    out.camera.height = 32;
    out.camera.fov_x = deg_to_rad(55.0);
    out.camera.fov_y = deg_to_rad(55.0);

    const double gammas[3] = {1.0, 3.0, 10.0};
    out.scene.gamma = gammas[seed % 3];
    out.scene.sh_degree = static_cast<int>(seed % 4);
    const int nc = 3 * sh_basis_count(out.scene.sh_degree);

    const int count = 4 + static_cast<int>(rng.uniform_index(7));  // 4..10
    const double tanf = out.camera.tan_half_x();
    for (int i = 0; i < count; ++i) {
        const double z = rng.uniform(2.5, 4.5);
        const double lateral = 0.55 * z * tanf;
        const Vec3 center{rng.uniform(-lateral, lateral), rng.uniform(-lateral, lateral), z};
        // Normal tilted at most ~70 degrees from the view axis.
        Vec3 normal;
        do {
            normal = rng.unit_vector();
        } while (std::fabs(normal.z) < 0.35);
        Vec3 seed_axis = std::fabs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 u = normal.cross(seed_axis).normalized();
        const Vec3 v = normal.cross(u);
        const double radius = rng.uniform(0.4, 0.8);
        const double phi = rng.uniform(0.0, 6.28318530717958647692);

        TrianglePrimitive prim;
        for (int k = 0; k < 3; ++k) {
            const double a = phi + k * (2.0 * 3.14159265358979323846 / 3.0);
            // Mild vertex irregularity, still far from degenerate.
            const double r = radius * rng.uniform(0.85, 1.15);
            prim.vertices[k] = center + (u * std::cos(a) + v * std::sin(a)) * r;
        }
        prim.opacity_param = unsquash_opacity(rng.uniform(0.3, 0.85));
        prim.sh.assign(nc, 0.0);
        const Vec3 color{rng.uniform(0.35, 0.85), rng.uniform(0.35, 0.85),
                         rng.uniform(0.35, 0.85)};
        const Vec3 dc = rgb_to_sh_dc(color);
        prim.sh[0] = dc.x;
        prim.sh[1] = dc.y;
        prim.sh[2] = dc.z;
        for (int c = 3; c < nc; ++c) prim.sh[c] = rng.uniform(-0.03, 0.03);
        out.scene.add(prim);
    }
    // Extent drives the vertex FD step.
    Vec3 centroid{};
    for (const Vec3& v : out.scene.vertex_data()) centroid += v;
    centroid = centroid / static_cast<double>(out.scene.vertex_data().size());
    double r2 = 0.0;
    for (const Vec3& v : out.scene.vertex_data())
        r2 = std::max(r2, (v - centroid).norm2());
    out.scene.scene_extent = std::sqrt(r2);
    return out;
}

namespace {

// Smooth render configuration: no contribution cutoff jumps, no early
// termination; production clamps stay.
RenderSettings gradcheck_settings() {
    RenderSettings st;
    st.training = true;
    st.min_contrib_opacity = 1e-12;
    st.termination_transmittance = 0.0;
    st.background = {0, 0, 0};
    return st;
}

struct CheckLoss {
    const char* name;
    RenderLossFn loss;
    PixelGrads grads;  // analytic dL/d(output)
};

std::vector<CheckLoss> make_losses(uint64_t seed, int h, int w) {
    std::vector<CheckLoss> out(3);
    Rng rng(seed * 77 + 13);

    // Photometric L1 against a target above the renderable range: the abs()
    // kink can never straddle.
    auto gt = std::make_shared<Image>(h, w, 3);
    for (size_t i = 0; i < gt->size(); ++i) gt->data()[i] = 2.0 + 0.5 * rng.uniform();
    const double inv_n = 1.0 / static_cast<double>(gt->size());
    out[0].name = "l1-color";
    out[0].loss = [gt](const RenderOutput& r) {
        double sum = 0.0;
        for (size_t i = 0; i < gt->size(); ++i)
            sum += std::fabs(r.color.data()[i] - gt->data()[i]);
        return sum / static_cast<double>(gt->size());
    };
    out[0].grads.color = Image(h, w, 3);
    for (size_t i = 0; i < gt->size(); ++i) out[0].grads.color.data()[i] = -inv_n;

    auto wd = std::make_shared<Image>(h, w, 1);
    for (size_t i = 0; i < wd->size(); ++i) wd->data()[i] = rng.uniform(-1.0, 1.0);
    const double inv_px = 1.0 / static_cast<double>(wd->size());
    out[1].name = "depth-sum";
    out[1].loss = [wd, inv_px](const RenderOutput& r) {
        double sum = 0.0;
        for (size_t i = 0; i < wd->size(); ++i) sum += wd->data()[i] * r.depth.data()[i];
        return sum * inv_px;
    };
    out[1].grads.depth = Image(h, w, 1);
    for (size_t i = 0; i < wd->size(); ++i) out[1].grads.depth.data()[i] = wd->data()[i] * inv_px;

    auto wn = std::make_shared<Image>(h, w, 3);
    for (size_t i = 0; i < wn->size(); ++i) wn->data()[i] = rng.uniform(-1.0, 1.0);
    out[2].name = "normal-sum";
    out[2].loss = [wn, inv_px](const RenderOutput& r) {
        double sum = 0.0;
        for (size_t i = 0; i < wn->size(); ++i) sum += wn->data()[i] * r.normal_raw.data()[i];
        return sum * inv_px;
    };
    out[2].grads.normal_raw = Image(h, w, 3);
    for (size_t i = 0; i < wn->size(); ++i)
        out[2].grads.normal_raw.data()[i] = wn->data()[i] * inv_px;
    return out;
}

bool agree(double analytic, double fd, double tol_rel, double tol_abs, double* rel_out) {
    const double err = std::fabs(analytic - fd);
    const double scale = std::max(std::fabs(analytic), std::fabs(fd));
    const double rel = scale > 0.0 ? err / scale : 0.0;
    if (rel_out) *rel_out = rel;
    return err <= tol_abs || rel <= tol_rel;
}

}  // namespace

GradCheckReport run_gradcheck(uint64_t base_seed, int num_scenes, double tol_rel, double tol_abs,
                              std::ostream* verbose) {
    GradCheckReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    const RenderSettings st = gradcheck_settings();

    for (int s = 0; s < num_scenes; ++s) {
        const uint64_t seed = base_seed + static_cast<uint64_t>(s);
        GradCheckScene gs = make_gradcheck_scene(seed);
        auto losses = make_losses(seed, gs.camera.height, gs.camera.width);

        FrameRecords records;
        render(gs.scene, gs.camera, st, &records);

        const double h_vertex = 1e-4 * gs.scene.scene_extent;
        const double h_other = 1e-4;
        double scene_max_rel = 0.0;

        for (CheckLoss& cl : losses) {
            const ParamGrads analytic = render_backward(gs.scene, records, cl.grads);
            const ParamGrads fd = finite_difference_gradients(gs.scene, gs.camera, st, cl.loss,
                                                              h_vertex, h_other);
            const size_t n = param_count(gs.scene);
            rep.coords_checked += static_cast<int>(n);
            for (size_t i = 0; i < n; ++i) {
                const double a = flatten_grad(analytic, gs.scene, i);
                const double f = flatten_grad(fd, gs.scene, i);
                double rel = 0.0;
                if (agree(a, f, tol_rel, tol_abs, &rel)) {
                    rep.max_rel_error = std::max(rep.max_rel_error, rel);
                    rep.max_initial_rel = std::max(rep.max_initial_rel, rel);
                    scene_max_rel = std::max(scene_max_rel, rel);
                    continue;
                }
                rep.max_initial_rel = std::max(rep.max_initial_rel, rel);
                // Step refinement: a straddled kink shrinks with h, a wrong
                // gradient does not.
                const double h0 = is_vertex_param(gs.scene, i) ? h_vertex : h_other;
                bool ok = false;
                double err_prev = std::fabs(a - f);
                for (double div : {100.0, 10000.0}) {
                    const double f2 = finite_difference_coord(gs.scene, gs.camera, st, cl.loss, i,
                                                              h0 / div);
                    const double err2 = std::fabs(a - f2);
                    double rel2 = 0.0;
                    if (err2 < err_prev && agree(a, f2, tol_rel, tol_abs, &rel2)) {
                        ok = true;
                        rep.refined += 1;
                        rep.max_rel_error = std::max(rep.max_rel_error, rel2);
                        scene_max_rel = std::max(scene_max_rel, rel2);
                        break;
                    }
                    err_prev = std::min(err_prev, err2);
                }
                if (!ok) {
                    rep.failed += 1;
                    std::ostringstream msg;
                    msg << "seed " << seed << " loss " << cl.name << " coord " << i
                        << " analytic " << a << " fd " << f << " rel " << rel;
                    rep.failures.push_back(msg.str());
                }
            }
        }
        rep.scenes += 1;
        if (verbose)
            (*verbose) << "scene seed " << seed << " gamma " << gs.scene.gamma << " prims "
                       << gs.scene.size() << " max_rel " << scene_max_rel << "\n";
    }
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace trisplat
