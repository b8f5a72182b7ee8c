#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "trisplat/core/gef.hpp"
#include "trisplat/kernels/kernels.hpp"
#include "trisplat/projection/projection.hpp"
#include "trisplat/raster/settings.hpp"
#include "trisplat/scene/camera.hpp"
#include "trisplat/scene/scene_model.hpp"

namespace trisplat {

inline constexpr double kBarycentricDetEps = 1e-10;
// Normalized-normal cutoff: blends shorter than this emit a zero normal.
inline constexpr double kNormalizeEps = 1e-8;

// Axis-aligned pixel-coordinate box, possibly empty.
struct Box2 {
    double xmin = 0.0, ymin = 0.0, xmax = -1.0, ymax = -1.0;
    bool empty() const { return !(xmax >= xmin && ymax >= ymin); }
};

// Barycentric coordinates of a pixel center wrt the (dilated) screen
// triangle; empty when the 2x2 system is singular.
std::optional<std::array<double, 3>> compute_barycentric(const ScreenTriangle& tri,
                                                         Vec2 pixel_center);

// Pixel-space box bounding every pixel whose shading opacity can reach
// `cutoff`: the triangle scaled by the eccentricity reach about its centroid,
// clamped to the image. Empty when the primitive cannot reach the cutoff.
Box2 level_set_bound(const ScreenTriangle& tri, double opacity, double gamma, double cutoff,
                     int width, int height);

// Depth-sorted per-tile triangle lists (indices into the frame's compacted
// triangle array; ties broken by primitive index).
struct TileBinning {
    int tile_size = 16;
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::vector<uint32_t>> lists;
};

// Per-frame derived state shared by the forward and backward passes.
struct FrameData {
    std::vector<ScreenTriangle> triangles;
    std::vector<ProjectionCache> caches;
    std::vector<Vec3> colors;                              // SH-evaluated per view
    std::vector<double> eff_opacity;                       // post-mode opacity O
    std::vector<kernels::TriangleShadeParams> shade;       // affine barycentric + O + 2*gamma
    std::vector<std::array<double, 3>> depth_affine;       // d(x,y) = [0]*px + [1]*py + [2]
    std::vector<std::array<int, 4>> pixel_bounds;          // x0,x1,y0,y1 inclusive
    TileBinning binning;
    double comp_k = 1.0;
    int active_sh_degree = 0;
};

// Projects, shades colors, and bins every primitive of the scene for one
// camera. Exposed for tests; render() calls it internally.
FrameData prepare_frame(const SceneModel& scene, const Camera& cam, const RenderSettings& st);

// Per-pixel shading records retained when settings.training is set, plus the
// frame state the backward pass replays.
struct FrameRecords {
    FrameData frame;
    Camera camera;
    RenderSettings settings;
    uint64_t scene_fingerprint = 0;
    // CSR over pixels (row-major), contributors in blend order.
    std::vector<uint32_t> offsets;   // H*W + 1
    std::vector<uint32_t> tri;       // index into frame.triangles
    std::vector<double> o_pre;       // pre-clamp shading opacity
    std::vector<double> final_transmittance;  // H*W
};

uint64_t scene_fingerprint(const SceneModel& scene, const Camera& cam);

RenderOutput render(const SceneModel& scene, const Camera& cam, const RenderSettings& settings,
                    FrameRecords* records = nullptr);

}  // namespace trisplat
