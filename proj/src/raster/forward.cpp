#include "trisplat/raster/forward.hpp"

#include <algorithm>
#include <cmath>

#include "trisplat/core/parallel.hpp"
#include "trisplat/scene/sh.hpp"

namespace trisplat {

std::optional<std::array<double, 3>> compute_barycentric(const ScreenTriangle& tri,
                                                         Vec2 pixel_center) {
    const Vec2 v1 = tri.screen_vertex(0), v2 = tri.screen_vertex(1), v3 = tri.screen_vertex(2);
    const Vec2 col0 = v1 - v3, col1 = v2 - v3;
    const double det = col0.x * col1.y - col1.x * col0.y;
    if (std::fabs(det) < kBarycentricDetEps) return std::nullopt;
    const Vec2 r = pixel_center - v3;
    const double a1 = (col1.y * r.x - col1.x * r.y) / det;
    const double a2 = (-col0.y * r.x + col0.x * r.y) / det;
    return std::array<double, 3>{a1, a2, 1.0 - a1 - a2};
}

Box2 level_set_bound(const ScreenTriangle& tri, double opacity, double gamma, double cutoff,
                     int width, int height) {
    const double emax = eccentricity_reach(opacity, gamma, cutoff);
    if (emax <= 0.0) return {};
    const Vec2 v[3] = {tri.screen_vertex(0), tri.screen_vertex(1), tri.screen_vertex(2)};
    const Vec2 g = (v[0] + v[1] + v[2]) / 3.0;
    Box2 box{g.x, g.y, g.x, g.y};
    for (const Vec2& vi : v) {
        const Vec2 p = g + (vi - g) * emax;
        box.xmin = std::min(box.xmin, p.x);
        box.ymin = std::min(box.ymin, p.y);
        box.xmax = std::max(box.xmax, p.x);
        box.ymax = std::max(box.ymax, p.y);
    }
    box.xmin = std::max(box.xmin, 0.0);
    box.ymin = std::max(box.ymin, 0.0);
    box.xmax = std::min(box.xmax, static_cast<double>(width));
    box.ymax = std::min(box.ymax, static_cast<double>(height));
    if (box.empty()) return {};
    return box;
}

uint64_t scene_fingerprint(const SceneModel& scene, const Camera& cam) {
    // FNV-1a over the parameter arrays and camera; cheap identity check for
    // forward/backward record pairing.
    uint64_t h = 1469598103934665603ull;
    auto mix_bytes = [&h](const void* data, size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const auto& v = scene.vertex_data();
    mix_bytes(v.data(), v.size() * sizeof(Vec3));
    mix_bytes(scene.opacity_data().data(), scene.opacity_data().size() * sizeof(double));
    mix_bytes(scene.sh_data().data(), scene.sh_data().size() * sizeof(double));
    mix_bytes(&scene.gamma, sizeof(double));
    const int deg = scene.sh_degree;
    mix_bytes(&deg, sizeof(int));
    mix_bytes(&cam.rotation, sizeof(Mat3));
    mix_bytes(&cam.translation, sizeof(Vec3));
    mix_bytes(&cam.width, sizeof(int));
    mix_bytes(&cam.height, sizeof(int));
    return h;
}

namespace {

double effective_opacity(double opacity_param, const RenderSettings& st) {
    const double o = squash_opacity(opacity_param);
    if (st.opacity_mode == OpacityMode::kSte) return o >= st.ste_threshold ? 1.0 : 0.0;
    return o;
}

// Inclusive pixel-index range of centers inside [lo, hi], padded one pixel.
void pixel_range(double lo, double hi, int limit, int& i0, int& i1) {
    i0 = static_cast<int>(std::ceil(lo - 0.5)) - 1;
    i1 = static_cast<int>(std::floor(hi - 0.5)) + 1;
    i0 = std::max(i0, 0);
    i1 = std::min(i1, limit - 1);
}

}  // namespace

FrameData prepare_frame(const SceneModel& scene, const Camera& cam, const RenderSettings& st) {
    FrameData fd;
    fd.comp_k = st.scale_compensation ? scale_compensation_factor(scene.gamma) : 1.0;
    fd.active_sh_degree = st.active_sh_degree >= 0 ? std::min(st.active_sh_degree, scene.sh_degree)
                                                   : scene.sh_degree;
    const size_t n = scene.size();
    const double two_gamma = 2.0 * scene.gamma;

    // Projection pass: parallel into fixed slots, then compacted in order.
    std::vector<uint8_t> valid(n, 0);
    std::vector<ScreenTriangle> tris(n);
    std::vector<ProjectionCache> caches(n);
    std::vector<double> opac(n);
    parallel_for(static_cast<int64_t>(n), [&](int64_t i) {
        const double o_eff = effective_opacity(scene.opacity_param(i), st);
        opac[i] = o_eff;
        if (o_eff <= st.min_contrib_opacity) return;  // never visible
        Vec3 verts[3] = {scene.vertex(i, 0), scene.vertex(i, 1), scene.vertex(i, 2)};
        auto tri = project_triangle(verts, cam, fd.comp_k, static_cast<uint32_t>(i), &caches[i]);
        if (!tri) return;
        tris[i] = *tri;
        valid[i] = 1;
    });

    size_t kept = 0;
    for (size_t i = 0; i < n; ++i) kept += valid[i];
    fd.triangles.reserve(kept);
    fd.caches.reserve(kept);
    for (size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        fd.triangles.push_back(tris[i]);
        fd.caches.push_back(caches[i]);
    }

    const size_t m = fd.triangles.size();
    fd.colors.resize(m);
    fd.eff_opacity.resize(m);
    fd.shade.resize(m);
    fd.depth_affine.resize(m);
    fd.pixel_bounds.assign(m, {0, -1, 0, -1});

    const int ts = st.tile_size;
    fd.binning.tile_size = ts;
    fd.binning.tiles_x = (cam.width + ts - 1) / ts;
    fd.binning.tiles_y = (cam.height + ts - 1) / ts;
    fd.binning.lists.assign(static_cast<size_t>(fd.binning.tiles_x) * fd.binning.tiles_y, {});

    std::vector<Box2> boxes(m);
    parallel_for(static_cast<int64_t>(m), [&](int64_t k) {
        const ScreenTriangle& tri = fd.triangles[k];
        const uint32_t pi = tri.primitive_index;
        fd.eff_opacity[k] = opac[pi];
        fd.colors[k] = sh_eval_color(fd.active_sh_degree, scene.sh(pi), fd.caches[k].color_dir);

        // Affine barycentric coefficients from the dilated screen vertices.
        const Vec2 v1 = tri.screen_vertex(0), v2 = tri.screen_vertex(1), v3 = tri.screen_vertex(2);
        const Vec2 col0 = v1 - v3, col1 = v2 - v3;
        const double det = col0.x * col1.y - col1.x * col0.y;
        kernels::TriangleShadeParams& sp = fd.shade[k];
        sp.a1x = col1.y / det;
        sp.a1y = -col1.x / det;
        sp.a1c = -(col1.y * v3.x - col1.x * v3.y) / det;
        sp.a2x = -col0.y / det;
        sp.a2y = col0.x / det;
        sp.a2c = (col0.y * v3.x - col0.x * v3.y) / det;
        sp.opacity = fd.eff_opacity[k];
        sp.two_gamma = two_gamma;

        // d(x,y) = sum_i a_i(x,y) * depth_i is affine as well.
        const double d1 = tri.vertex_depths[0], d2 = tri.vertex_depths[1],
                     d3 = tri.vertex_depths[2];
        fd.depth_affine[k] = {sp.a1x * (d1 - d3) + sp.a2x * (d2 - d3),
                              sp.a1y * (d1 - d3) + sp.a2y * (d2 - d3),
                              sp.a1c * (d1 - d3) + sp.a2c * (d2 - d3) + d3};

        boxes[k] = level_set_bound(tri, fd.eff_opacity[k], scene.gamma, st.min_contrib_opacity,
                                   cam.width, cam.height);
        if (!boxes[k].empty()) {
            auto& pb = fd.pixel_bounds[k];
            pixel_range(boxes[k].xmin, boxes[k].xmax, cam.width, pb[0], pb[1]);
            pixel_range(boxes[k].ymin, boxes[k].ymax, cam.height, pb[2], pb[3]);
        }
    });

    // Serial binning keeps tile lists independent of scheduling; the sort
    // below canonicalizes order anyway.
    for (size_t k = 0; k < m; ++k) {
        const auto& pb = fd.pixel_bounds[k];
        if (pb[1] < pb[0] || pb[3] < pb[2]) continue;
        const int tx0 = pb[0] / ts, tx1 = pb[1] / ts;
        const int ty0 = pb[2] / ts, ty1 = pb[3] / ts;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx)
                fd.binning.lists[static_cast<size_t>(ty) * fd.binning.tiles_x + tx].push_back(
                    static_cast<uint32_t>(k));
    }
    parallel_for(static_cast<int64_t>(fd.binning.lists.size()), [&](int64_t t) {
        auto& list = fd.binning.lists[t];
        std::sort(list.begin(), list.end(), [&](uint32_t a, uint32_t b) {
            if (fd.triangles[a].sort_depth != fd.triangles[b].sort_depth)
                return fd.triangles[a].sort_depth < fd.triangles[b].sort_depth;
            return fd.triangles[a].primitive_index < fd.triangles[b].primitive_index;
        });
    });
    return fd;
}

namespace {

struct TileScratch {
    std::vector<double> transmittance, color_r, color_g, color_b, depth;
    std::vector<double> nx, ny, nz;
    std::vector<int32_t> count;
    std::vector<uint8_t> active;
    std::vector<double> orow;
    // training-mode contribution log, appended in blend order
    std::vector<uint32_t> c_pixel, c_tri;
    std::vector<double> c_opre;

    void reset(int npx) {
        transmittance.assign(npx, 1.0);
        color_r.assign(npx, 0.0);
        color_g.assign(npx, 0.0);
        color_b.assign(npx, 0.0);
        depth.assign(npx, 0.0);
        nx.assign(npx, 0.0);
        ny.assign(npx, 0.0);
        nz.assign(npx, 0.0);
        count.assign(npx, 0);
        active.assign(npx, 1);
        c_pixel.clear();
        c_tri.clear();
        c_opre.clear();
    }
};

}  // namespace

RenderOutput render(const SceneModel& scene, const Camera& cam, const RenderSettings& st,
                    FrameRecords* records) {
    cam.validate();
    const int W = cam.width, H = cam.height;
    RenderOutput out;
    out.color = Image(H, W, 3);
    out.depth = Image(H, W, 1);
    out.normal = Image(H, W, 3);
    out.normal_raw = Image(H, W, 3);
    out.alpha = Image(H, W, 1);
    out.contrib_count.assign(static_cast<size_t>(H) * W, 0);

    FrameData local_frame;
    FrameData* fd = &local_frame;
    const bool training = st.training && records != nullptr;
    if (records) {
        records->camera = cam;
        records->settings = st;
        records->scene_fingerprint = scene_fingerprint(scene, cam);
        records->frame = prepare_frame(scene, cam, st);
        fd = &records->frame;
    } else {
        local_frame = prepare_frame(scene, cam, st);
    }

    const int ts = st.tile_size;
    const int tiles_x = fd->binning.tiles_x, tiles_y = fd->binning.tiles_y;
    const int ntiles = tiles_x * tiles_y;
    std::vector<double> final_T(static_cast<size_t>(H) * W, 1.0);

    // Per-tile contribution logs, concatenated in tile order afterwards.
    std::vector<std::vector<uint32_t>> tile_cpix(training ? ntiles : 0);
    std::vector<std::vector<uint32_t>> tile_ctri(training ? ntiles : 0);
    std::vector<std::vector<double>> tile_copre(training ? ntiles : 0);

    const auto& ops = kernels::active_ops();
    const double cutoff = st.min_contrib_opacity;
    const double o_clamp = st.max_contrib_opacity;
    const double term = st.termination_transmittance;

    parallel_for(ntiles, [&](int64_t t) {
        const int tx = static_cast<int>(t % tiles_x), ty = static_cast<int>(t / tiles_x);
        const int x0 = tx * ts, y0 = ty * ts;
        const int x1 = std::min(x0 + ts, W), y1 = std::min(y0 + ts, H);
        const int tw = x1 - x0, th = y1 - y0;
        const int npx = tw * th;

        TileScratch s;
        s.reset(npx);
        s.orow.resize(tw);
        int active_left = npx;

        for (uint32_t k : fd->binning.lists[t]) {
            if (active_left == 0) break;
            const auto& pb = fd->pixel_bounds[k];
            const int rx0 = std::max(pb[0], x0), rx1 = std::min(pb[1], x1 - 1);
            const int ry0 = std::max(pb[2], y0), ry1 = std::min(pb[3], y1 - 1);
            if (rx1 < rx0 || ry1 < ry0) continue;
            const auto& sp = fd->shade[k];
            const auto& da = fd->depth_affine[k];
            const Vec3 color = fd->colors[k];
            const Vec3 nrm = fd->triangles[k].view_normal;
            for (int y = ry0; y <= ry1; ++y) {
                const double py = y + 0.5;
                const int nrun = rx1 - rx0 + 1;
                ops.opacity_row(sp, rx0 + 0.5, py, nrun, s.orow.data());
                const int rowbase = (y - y0) * tw - x0;
                for (int x = rx0; x <= rx1; ++x) {
                    const int p = rowbase + x;
                    if (!s.active[p]) continue;
                    const double o_pre = s.orow[x - rx0];
                    if (o_pre < cutoff) continue;
                    const double o = o_pre < o_clamp ? o_pre : o_clamp;
                    const double T = s.transmittance[p];
                    const double w = o * T;
                    s.color_r[p] += color.x * w;
                    s.color_g[p] += color.y * w;
                    s.color_b[p] += color.z * w;
                    s.depth[p] += (da[0] * (x + 0.5) + da[1] * py + da[2]) * w;
                    s.nx[p] += nrm.x * w;
                    s.ny[p] += nrm.y * w;
                    s.nz[p] += nrm.z * w;
                    s.count[p] += 1;
                    if (training) {
                        s.c_pixel.push_back(static_cast<uint32_t>(p));
                        s.c_tri.push_back(k);
                        s.c_opre.push_back(o_pre);
                    }
                    const double Tn = T * (1.0 - o);
                    s.transmittance[p] = Tn;
                    if (Tn < term) {
                        s.active[p] = 0;
                        --active_left;
                    }
                }
            }
        }

        // Commit tile buffers.
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const int p = (y - y0) * tw + (x - x0);
                const double T = s.transmittance[p];
                out.color.at(0, y, x) = s.color_r[p] + T * st.background.x;
                out.color.at(1, y, x) = s.color_g[p] + T * st.background.y;
                out.color.at(2, y, x) = s.color_b[p] + T * st.background.z;
                out.depth.at(0, y, x) = s.depth[p];
                const Vec3 raw{s.nx[p], s.ny[p], s.nz[p]};
                out.normal_raw.set_rgb(y, x, raw);
                const double len = raw.norm();
                out.normal.set_rgb(y, x, len >= kNormalizeEps ? raw / len : Vec3{});
                out.alpha.at(0, y, x) = 1.0 - T;
                out.contrib_count[static_cast<size_t>(y) * W + x] = s.count[p];
                final_T[static_cast<size_t>(y) * W + x] = T;
            }
        }
        if (training) {
            // Group the blend-ordered log by pixel (stable counting sort).
            std::vector<uint32_t> counts(npx + 1, 0);
            for (uint32_t p : s.c_pixel) counts[p + 1]++;
            for (int i = 0; i < npx; ++i) counts[i + 1] += counts[i];
            auto& cpix = tile_cpix[t];
            auto& ctri = tile_ctri[t];
            auto& copre = tile_copre[t];
            ctri.resize(s.c_tri.size());
            copre.resize(s.c_opre.size());
            cpix = std::move(counts);  // per-pixel offsets within the tile block
            std::vector<uint32_t> cursor(cpix.begin(), cpix.end() - 1);
            for (size_t i = 0; i < s.c_tri.size(); ++i) {
                const uint32_t slot = cursor[s.c_pixel[i]]++;
                ctri[slot] = s.c_tri[i];
                copre[slot] = s.c_opre[i];
            }
        }
    });

    if (records) {
        records->final_transmittance = std::move(final_T);
        records->offsets.assign(static_cast<size_t>(H) * W + 1, 0);
        records->tri.clear();
        records->o_pre.clear();
        if (training) {
            // Stitch tile blocks into a global pixel-major CSR.
            size_t total = 0;
            for (int t = 0; t < ntiles; ++t) total += tile_ctri[t].size();
            records->tri.resize(total);
            records->o_pre.resize(total);
            // counts per global pixel
            for (int t = 0; t < ntiles; ++t) {
                const int tx = t % tiles_x, ty = t / tiles_x;
                const int x0 = tx * ts, y0 = ty * ts;
                const int tw = std::min(x0 + ts, W) - x0;
                const auto& cpix = tile_cpix[t];
                if (cpix.empty()) continue;
                const int npx = static_cast<int>(cpix.size()) - 1;
                for (int p = 0; p < npx; ++p) {
                    const int y = y0 + p / tw, x = x0 + p % tw;
                    records->offsets[static_cast<size_t>(y) * W + x + 1] = cpix[p + 1] - cpix[p];
                }
            }
            for (size_t i = 1; i < records->offsets.size(); ++i)
                records->offsets[i] += records->offsets[i - 1];
            parallel_for(ntiles, [&](int64_t t) {
                const int tx = static_cast<int>(t % tiles_x), ty = static_cast<int>(t / tiles_x);
                const int x0 = tx * ts, y0 = ty * ts;
                const int tw = std::min(x0 + ts, W) - x0;
                const auto& cpix = tile_cpix[t];
                if (cpix.empty()) return;
                const int npx = static_cast<int>(cpix.size()) - 1;
                for (int p = 0; p < npx; ++p) {
                    const int y = y0 + p / tw, x = x0 + p % tw;
                    uint32_t dst = records->offsets[static_cast<size_t>(y) * W + x];
                    for (uint32_t i = cpix[p]; i < cpix[p + 1]; ++i, ++dst) {
                        records->tri[dst] = tile_ctri[t][i];
                        records->o_pre[dst] = tile_copre[t][i];
                    }
                }
            });
        }
    }
    return out;
}

}  // namespace trisplat
