#include "trisplat/raster/backward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "trisplat/core/parallel.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

Image normalize_backward(const Image& raw, const Image& d_unit) {
    raw.require_shape(d_unit, "normalize_backward");
    Image out(raw.height(), raw.width(), 3);
    const size_t n = raw.pixel_count();
    const double* rx = raw.plane(0);
    const double* ry = raw.plane(1);
    const double* rz = raw.plane(2);
    const double* gx = d_unit.plane(0);
    const double* gy = d_unit.plane(1);
    const double* gz = d_unit.plane(2);
    for (size_t i = 0; i < n; ++i) {
        const Vec3 x{rx[i], ry[i], rz[i]};
        const double len = x.norm();
        if (len < kNormalizeEps) continue;
        const Vec3 g{gx[i], gy[i], gz[i]};
        const Vec3 u = x / len;
        const Vec3 d = (g - u * u.dot(g)) / len;
        out.plane(0)[i] = d.x;
        out.plane(1)[i] = d.y;
        out.plane(2)[i] = d.z;
    }
    return out;
}

namespace {

struct TriangleBlendGrads {
    Vec2 d_screen_vertex[3];
    double d_vertex_depth[3] = {0, 0, 0};
    Vec3 d_view_normal;
    Vec3 d_color;
    double d_opacity_eff = 0.0;

    void add(const TriangleBlendGrads& o) {
        for (int i = 0; i < 3; ++i) {
            d_screen_vertex[i] += o.d_screen_vertex[i];
            d_vertex_depth[i] += o.d_vertex_depth[i];
        }
        d_view_normal += o.d_view_normal;
        d_color += o.d_color;
        d_opacity_eff += o.d_opacity_eff;
    }
};

}  // namespace

ParamGrads render_backward(const SceneModel& scene, const FrameRecords& records,
                           const PixelGrads& pixel_grads) {
    if (!records.settings.training)
        throw std::invalid_argument("render_backward: records were not produced in training mode");
    if (records.scene_fingerprint != scene_fingerprint(scene, records.camera))
        throw std::invalid_argument("render_backward: records do not match scene/camera");

    const Camera& cam = records.camera;
    const RenderSettings& st = records.settings;
    const FrameData& fd = records.frame;
    const int W = cam.width, H = cam.height;
    const double o_clamp = st.max_contrib_opacity;
    const double gamma = scene.gamma;

    const bool has_c = !pixel_grads.color.empty();
    const bool has_d = !pixel_grads.depth.empty();
    const bool has_n = !pixel_grads.normal_raw.empty();
    const bool has_a = !pixel_grads.alpha.empty();
    if (has_c) {
        if (pixel_grads.color.height() != H || pixel_grads.color.width() != W)
            throw std::invalid_argument("render_backward: color grad shape mismatch");
    }

    ParamGrads grads;
    grads.resize_for(scene);

    const int ts = fd.binning.tile_size;
    const int tiles_x = fd.binning.tiles_x, tiles_y = fd.binning.tiles_y;
    const int ntiles = tiles_x * tiles_y;

    // Per-tile slot accumulators keyed by the tile list; merged afterwards in
    // tile order so the result is independent of scheduling.
    std::vector<std::vector<TriangleBlendGrads>> tile_grads(ntiles);

    parallel_for(ntiles, [&](int64_t t) {
        const auto& list = fd.binning.lists[t];
        if (list.empty()) return;
        std::unordered_map<uint32_t, uint32_t> slot_of;
        slot_of.reserve(list.size());
        for (uint32_t s = 0; s < list.size(); ++s) slot_of.emplace(list[s], s);
        auto& acc = tile_grads[t];
        acc.assign(list.size(), {});

        const int tx = static_cast<int>(t % tiles_x), ty = static_cast<int>(t / tiles_x);
        const int x0 = tx * ts, y0 = ty * ts;
        const int x1 = std::min(x0 + ts, W), y1 = std::min(y0 + ts, H);

        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const size_t p = static_cast<size_t>(y) * W + x;
                const uint32_t lo = records.offsets[p], hi = records.offsets[p + 1];
                if (lo == hi) continue;
                const double px = x + 0.5, py = y + 0.5;
                const Vec3 gc = has_c ? pixel_grads.color.rgb(y, x) : Vec3{};
                const double gd = has_d ? pixel_grads.depth.at(0, y, x) : 0.0;
                const Vec3 gn = has_n ? pixel_grads.normal_raw.rgb(y, x) : Vec3{};
                const double ga = has_a ? pixel_grads.alpha.at(0, y, x) : 0.0;

                const double T_final = records.final_transmittance[p];
                double T_next = T_final;
                Vec3 accum_c = Vec3{st.background.x, st.background.y, st.background.z} * T_final;
                double accum_d = 0.0;
                Vec3 accum_n{};

                for (uint32_t i = hi; i-- > lo;) {
                    const uint32_t k = records.tri[i];
                    const double o_pre = records.o_pre[i];
                    const double o = o_pre < o_clamp ? o_pre : o_clamp;
                    const double om = 1.0 - o;
                    const double T_i = T_next / om;
                    const double w = o * T_i;

                    const auto& sp = fd.shade[k];
                    const ScreenTriangle& tri = fd.triangles[k];
                    const double a1 = sp.a1x * px + sp.a1y * py + sp.a1c;
                    const double a2 = sp.a2x * px + sp.a2y * py + sp.a2c;
                    const double a3 = 1.0 - a1 - a2;
                    const double d1 = tri.vertex_depths[0], d2 = tri.vertex_depths[1],
                                 d3 = tri.vertex_depths[2];
                    const double depth_val = a1 * d1 + a2 * d2 + a3 * d3;
                    const Vec3 color = fd.colors[k];
                    const Vec3 nrm = tri.view_normal;

                    TriangleBlendGrads& G = acc[slot_of.find(k)->second];
                    G.d_color += gc * w;
                    G.d_view_normal += gn * w;
                    const double gdep = gd * w;
                    G.d_vertex_depth[0] += gdep * a1;
                    G.d_vertex_depth[1] += gdep * a2;
                    G.d_vertex_depth[2] += gdep * a3;
                    double da1 = gdep * (d1 - d3);
                    double da2 = gdep * (d2 - d3);

                    double dLdo = gc.dot(color * T_i - accum_c / om);
                    dLdo += gd * (depth_val * T_i - accum_d / om);
                    dLdo += gn.dot(nrm * T_i - accum_n / om);
                    dLdo += ga * (T_final / om);

                    if (o_pre < o_clamp) {
                        const double o_eff = sp.opacity;
                        G.d_opacity_eff += dLdo * (o_pre / o_eff);
                        // e-chain: d o/d e = -gamma * e^(2g-1) * o, with
                        // e^(2g) recovered from the stored opacity.
                        double amin = a1;
                        int arg = 0;
                        if (a2 < amin) {
                            amin = a2;
                            arg = 1;
                        }
                        if (a3 < amin) {
                            amin = a3;
                            arg = 2;
                        }
                        const double e = 1.0 - 3.0 * amin;
                        if (e > 1e-12) {
                            const double e_2g = -2.0 * ts_log(o_pre / o_eff);
                            const double dode = -gamma * (e_2g / e) * o_pre;
                            const double dLde = dLdo * dode;
                            if (arg == 0)
                                da1 += -3.0 * dLde;
                            else if (arg == 1)
                                da2 += -3.0 * dLde;
                            else {
                                da1 += 3.0 * dLde;
                                da2 += 3.0 * dLde;
                            }
                        }
                    }

                    // Barycentric solve backward: dL/dP_j = -a_j * dr with
                    // dr = da1 * grad(a1) + da2 * grad(a2).
                    const Vec2 dr{da1 * sp.a1x + da2 * sp.a2x, da1 * sp.a1y + da2 * sp.a2y};
                    G.d_screen_vertex[0] += dr * -a1;
                    G.d_screen_vertex[1] += dr * -a2;
                    G.d_screen_vertex[2] += dr * -a3;

                    accum_c += color * w;
                    accum_d += depth_val * w;
                    accum_n += nrm * w;
                    T_next = T_i;
                }
            }
        }
    });

    // Merge tile contributions per frame triangle, in tile order.
    std::vector<TriangleBlendGrads> merged(fd.triangles.size());
    for (int t = 0; t < ntiles; ++t) {
        const auto& list = fd.binning.lists[t];
        const auto& acc = tile_grads[t];
        for (size_t s = 0; s < acc.size(); ++s) merged[list[s]].add(acc[s]);
    }

    // Parameter chains per primitive (each appears in at most one slot).
    const int active_deg = fd.active_sh_degree;
    parallel_for(static_cast<int64_t>(fd.triangles.size()), [&](int64_t k) {
        const TriangleBlendGrads& G = merged[k];
        const ScreenTriangle& tri = fd.triangles[k];
        const ProjectionCache& cache = fd.caches[k];
        const uint32_t pi = tri.primitive_index;

        const Vec3 ddir = sh_eval_color_backward(active_deg, scene.sh(pi), cache.color_dir,
                                                 G.d_color, &grads.d_sh[pi * scene.sh_coeffs_per_prim()]);

        const double o_sig = scene.opacity(pi);
        // Sigmoid squash; in STE mode the estimator passes d/dO through
        // unchanged, so the chain is identical.
        grads.d_opacity_param[pi] += G.d_opacity_eff * o_sig * (1.0 - o_sig);

        PrimScreenGrads psg;
        for (int i = 0; i < 3; ++i) {
            psg.d_screen_vertex[i] = G.d_screen_vertex[i];
            psg.d_vertex_depth[i] = G.d_vertex_depth[i];
        }
        psg.d_view_normal = G.d_view_normal;
        project_triangle_backward(tri, cache, cam, psg, ddir, &grads.d_vertices[3 * pi]);
    });

    return grads;
}

}  // namespace trisplat
