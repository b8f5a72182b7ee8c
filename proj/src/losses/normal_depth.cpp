#include "trisplat/losses/normal_depth.hpp"

#include <algorithm>
#include <cmath>

namespace trisplat {
namespace {

inline int clamp_idx(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Scharr 3x3, normalized to a per-pixel derivative estimate.
constexpr double kScharrX[3][3] = {{-3, 0, 3}, {-10, 0, 10}, {-3, 0, 3}};
constexpr double kScharrNorm = 1.0 / 32.0;

void scharr(const Image& depth, Image& gx, Image& gy) {
    const int h = depth.height(), w = depth.width();
    const double* d = depth.plane(0);
    double* px = gx.plane(0);
    double* py = gy.plane(0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sx = 0.0, sy = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const double* row = d + static_cast<size_t>(clamp_idx(y + dy, h)) * w;
                for (int dx = -1; dx <= 1; ++dx) {
                    const double v = row[clamp_idx(x + dx, w)];
                    sx += kScharrX[dy + 1][dx + 1] * v;
                    sy += kScharrX[dx + 1][dy + 1] * v;  // transposed kernel
                }
            }
            px[static_cast<size_t>(y) * w + x] = sx * kScharrNorm;
            py[static_cast<size_t>(y) * w + x] = sy * kScharrNorm;
        }
    }
}

void scharr_adjoint(const Image& d_gx, const Image& d_gy, Image& d_depth) {
    const int h = d_gx.height(), w = d_gx.width();
    const double* gx = d_gx.plane(0);
    const double* gy = d_gy.plane(0);
    double* out = d_depth.plane(0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t p = static_cast<size_t>(y) * w + x;
            const double vx = gx[p], vy = gy[p];
            if (vx == 0.0 && vy == 0.0) continue;
            for (int dy = -1; dy <= 1; ++dy) {
                double* row = out + static_cast<size_t>(clamp_idx(y + dy, h)) * w;
                for (int dx = -1; dx <= 1; ++dx) {
                    row[clamp_idx(x + dx, w)] += kScharrNorm * (kScharrX[dy + 1][dx + 1] * vx +
                                                                kScharrX[dx + 1][dy + 1] * vy);
                }
            }
        }
    }
}

struct InferredPixel {
    Vec3 unit;
    Vec3 v;       // pre-normalization direction
    double dc;    // clamped depth
    double gx, gy;
    bool valid;
};

InferredPixel infer_pixel(const Image& depth, const Image& grad_x, const Image& grad_y,
                          const Camera& cam, int y, int x) {
    InferredPixel r{};
    const double d = depth.at(0, y, x);
    r.valid = d > kDepthEps;
    if (!r.valid) return r;
    r.dc = d;
    r.gx = grad_x.at(0, y, x);
    r.gy = grad_y.at(0, y, x);
    const double Dx = r.gx / r.dc, Dy = r.gy / r.dc;
    const double xr = x - 0.5 * cam.width + 0.5;
    const double yr = y - 0.5 * cam.height + 0.5;
    // x/y components flipped relative to mirrored-pixel-axis conventions:
    // with pixel axes aligned to the view axes (x right, y down), a surface
    // sloping away along +x tilts the away-facing normal toward -x.
    r.v = {-cam.width * Dx / (2.0 * cam.tan_half_x()),
           -cam.height * Dy / (2.0 * cam.tan_half_y()), 1.0 + Dx * xr + Dy * yr};
    const double len = r.v.norm();
    if (!(len > 1e-12) || !std::isfinite(len)) {
        r.valid = false;
        return r;
    }
    r.unit = r.v / len;
    return r;
}

}  // namespace

NormalFromDepth normal_from_depth(const Image& depth, const Camera& cam) {
    const int h = depth.height(), w = depth.width();
    NormalFromDepth out;
    out.grad_x = Image(h, w, 1);
    out.grad_y = Image(h, w, 1);
    out.inferred = Image(h, w, 3);
    out.valid.assign(static_cast<size_t>(h) * w, 0);
    scharr(depth, out.grad_x, out.grad_y);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const InferredPixel p = infer_pixel(depth, out.grad_x, out.grad_y, cam, y, x);
            if (!p.valid) continue;
            out.valid[static_cast<size_t>(y) * w + x] = 1;
            out.inferred.set_rgb(y, x, p.unit);
        }
    }
    return out;
}

double normal_consistency_loss(const Image& rendered_unit_normal, const NormalFromDepth& nfd,
                               const std::vector<uint8_t>& mask) {
    const int h = rendered_unit_normal.height(), w = rendered_unit_normal.width();
    double sum = 0.0;
    size_t cnt = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t p = static_cast<size_t>(y) * w + x;
            if (!nfd.valid[p]) continue;
            if (!mask.empty() && !mask[p]) continue;
            sum += 1.0 - rendered_unit_normal.rgb(y, x).dot(nfd.inferred.rgb(y, x));
            ++cnt;
        }
    }
    return cnt ? sum / static_cast<double>(cnt) : 0.0;
}

double normal_consistency_loss_backward(const Image& rendered_unit_normal, const Image& depth,
                                        const Camera& cam, const std::vector<uint8_t>& mask,
                                        Image* d_rendered_unit, Image* d_depth) {
    const int h = depth.height(), w = depth.width();
    NormalFromDepth nfd = normal_from_depth(depth, cam);
    size_t cnt = 0;
    double sum = 0.0;
    for (size_t p = 0; p < nfd.valid.size(); ++p)
        if (nfd.valid[p] && (mask.empty() || mask[p])) ++cnt;
    if (d_rendered_unit) *d_rendered_unit = Image(h, w, 3);
    if (d_depth) *d_depth = Image(h, w, 1);
    if (cnt == 0) return 0.0;
    const double inv_cnt = 1.0 / static_cast<double>(cnt);

    Image d_gx(h, w, 1), d_gy(h, w, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t p = static_cast<size_t>(y) * w + x;
            if (!nfd.valid[p]) continue;
            if (!mask.empty() && !mask[p]) continue;
            const InferredPixel ip = infer_pixel(depth, nfd.grad_x, nfd.grad_y, cam, y, x);
            const Vec3 n = rendered_unit_normal.rgb(y, x);
            sum += 1.0 - n.dot(ip.unit);
            if (d_rendered_unit) {
                Vec3 g = ip.unit * -inv_cnt;
                d_rendered_unit->at(0, y, x) += g.x;
                d_rendered_unit->at(1, y, x) += g.y;
                d_rendered_unit->at(2, y, x) += g.z;
            }
            if (!d_depth) continue;
            // dL/dn' = -n/cnt, through the normalization.
            const double len = ip.v.norm();
            const Vec3 gn = n * -inv_cnt;
            const Vec3 dv = (gn - ip.unit * ip.unit.dot(gn)) / len;
            const double xr = x - 0.5 * cam.width + 0.5;
            const double yr = y - 0.5 * cam.height + 0.5;
            const double dDx = -dv.x * cam.width / (2.0 * cam.tan_half_x()) + dv.z * xr;
            const double dDy = -dv.y * cam.height / (2.0 * cam.tan_half_y()) + dv.z * yr;
            // D = g/d with d > eps here (clamp inactive).
            d_gx.at(0, y, x) += dDx / ip.dc;
            d_gy.at(0, y, x) += dDy / ip.dc;
            d_depth->at(0, y, x) += -(dDx * ip.gx + dDy * ip.gy) / (ip.dc * ip.dc);
        }
    }
    if (d_depth) scharr_adjoint(d_gx, d_gy, *d_depth);
    return sum * inv_cnt;
}

double opacity_regularization(const std::vector<double>& opacities) {
    if (opacities.empty()) return 0.0;
    double sum = 0.0;
    for (double o : opacities) sum += 0.25 - (o - 0.5) * (o - 0.5);
    return sum / static_cast<double>(opacities.size());
}

void opacity_regularization_grad(const std::vector<double>& opacities, double weight,
                                 std::vector<double>& d_opacity) {
    if (opacities.empty()) return;
    const double scale = weight / static_cast<double>(opacities.size());
    for (size_t i = 0; i < opacities.size(); ++i)
        d_opacity[i] += scale * -2.0 * (opacities[i] - 0.5);
}

}  // namespace trisplat
