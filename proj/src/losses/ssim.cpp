#include "trisplat/losses/ssim.hpp"

#include <array>
#include <cmath>

#include "trisplat/core/parallel.hpp"
#include "trisplat/kernels/kernel_impl.hpp"
#include "trisplat/kernels/kernels.hpp"

namespace trisplat {
namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, 11>& window() {
    static const std::array<double, 11> k = [] {
        std::array<double, 11> w{};
        double sum = 0.0;
        for (int i = 0; i < 11; ++i) {
            const double d = i - 5;
            w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            sum += w[i];
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return k;
}

void blur_plane(const double* src, double* dst, double* tmp, int h, int w) {
    const auto& ops = kernels::active_ops();
    const double* k = window().data();
    parallel_for(h, [&](int64_t y) {
        ops.conv11_h(src + y * w, w, k, tmp + y * w);
    });
    parallel_for(h, [&](int64_t y) {
        const double* rows[11];
        for (int j = 0; j < 11; ++j) {
            const int ry = kernels::detail::reflect_index(static_cast<int>(y) + j - 5, h);
            rows[j] = tmp + static_cast<size_t>(ry) * w;
        }
        ops.conv11_v(rows, w, k, dst + y * w);
    });
}

// Scatter adjoints of the two separable passes (reflective padding).
void blur_adjoint_plane(const double* grad, double* dst, double* tmp, int h, int w) {
    const double* k = window().data();
    std::fill(tmp, tmp + static_cast<size_t>(h) * w, 0.0);
    for (int y = 0; y < h; ++y) {  // vertical adjoint
        for (int j = 0; j < 11; ++j) {
            const int ry = kernels::detail::reflect_index(y + j - 5, h);
            const double kj = k[j];
            const double* g = grad + static_cast<size_t>(y) * w;
            double* t = tmp + static_cast<size_t>(ry) * w;
            for (int x = 0; x < w; ++x) t[x] += kj * g[x];
        }
    }
    std::fill(dst, dst + static_cast<size_t>(h) * w, 0.0);
    for (int y = 0; y < h; ++y) {  // horizontal adjoint
        const double* t = tmp + static_cast<size_t>(y) * w;
        double* d = dst + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const double g = t[x];
            for (int j = 0; j < 11; ++j) d[kernels::detail::reflect_index(x + j - 5, w)] += k[j] * g;
        }
    }
}

}  // namespace

Image ssim_blur(const Image& src) {
    Image out(src.height(), src.width(), src.channels());
    std::vector<double> tmp(src.pixel_count());
    for (int c = 0; c < src.channels(); ++c)
        blur_plane(src.plane(c), out.plane(c), tmp.data(), src.height(), src.width());
    return out;
}

Image ssim_blur_adjoint(const Image& grad) {
    Image out(grad.height(), grad.width(), grad.channels());
    std::vector<double> tmp(grad.pixel_count());
    for (int c = 0; c < grad.channels(); ++c)
        blur_adjoint_plane(grad.plane(c), out.plane(c), tmp.data(), grad.height(), grad.width());
    return out;
}

double ssim(const Image& a, const Image& b, Image* d_a) {
    a.require_shape(b, "ssim");
    const int h = a.height(), w = a.width(), ch = a.channels();
    const size_t npx = a.pixel_count();
    const double inv_n = 1.0 / (static_cast<double>(npx) * ch);

    if (d_a) *d_a = Image(h, w, ch);

    std::vector<double> tmp(npx), prod(npx);
    std::vector<double> mu_a(npx), mu_b(npx), e_aa(npx), e_bb(npx), e_ab(npx);
    std::vector<double> g_mu(d_a ? npx : 0), g_eaa(d_a ? npx : 0), g_eab(d_a ? npx : 0);
    const auto& ops = kernels::active_ops();

    double total = 0.0;
    for (int c = 0; c < ch; ++c) {
        const double* pa = a.plane(c);
        const double* pb = b.plane(c);
        const int n = static_cast<int>(npx);
        blur_plane(pa, mu_a.data(), tmp.data(), h, w);
        blur_plane(pb, mu_b.data(), tmp.data(), h, w);
        ops.mul_arrays(pa, pa, prod.data(), n);
        blur_plane(prod.data(), e_aa.data(), tmp.data(), h, w);
        ops.mul_arrays(pb, pb, prod.data(), n);
        blur_plane(prod.data(), e_bb.data(), tmp.data(), h, w);
        ops.mul_arrays(pa, pb, prod.data(), n);
        blur_plane(prod.data(), e_ab.data(), tmp.data(), h, w);

        // Fixed-block summation: result independent of thread count.
        double channel_sum = 0.0;
        for (size_t i = 0; i < npx; ++i) {
            const double ma = mu_a[i], mb = mu_b[i];
            const double va = e_aa[i] - ma * ma;
            const double vb = e_bb[i] - mb * mb;
            const double vab = e_ab[i] - ma * mb;
            const double a1 = 2.0 * ma * mb + kC1;
            const double a2 = 2.0 * vab + kC2;
            const double b1 = ma * ma + mb * mb + kC1;
            const double b2 = va + vb + kC2;
            const double s = (a1 * a2) / (b1 * b2);
            channel_sum += s;
            if (d_a) {
                g_mu[i] = s * (2.0 * mb / a1 - 2.0 * ma / b1) + 2.0 * ma * s / b2 -
                          2.0 * mb * s / a2;
                g_eaa[i] = -s / b2;
                g_eab[i] = 2.0 * s / a2;
            }
        }
        total += channel_sum;

        if (d_a) {
            // d mean(S) / da = (1/N)(blur^T g_mu + 2a blur^T g_eaa + b blur^T g_eab)
            std::vector<double> adj(npx);
            double* out_plane = d_a->plane(c);
            blur_adjoint_plane(g_mu.data(), adj.data(), tmp.data(), h, w);
            for (size_t i = 0; i < npx; ++i) out_plane[i] = adj[i];
            blur_adjoint_plane(g_eaa.data(), adj.data(), tmp.data(), h, w);
            for (size_t i = 0; i < npx; ++i) out_plane[i] += 2.0 * pa[i] * adj[i];
            blur_adjoint_plane(g_eab.data(), adj.data(), tmp.data(), h, w);
            for (size_t i = 0; i < npx; ++i) out_plane[i] += pb[i] * adj[i];
            for (size_t i = 0; i < npx; ++i) out_plane[i] *= inv_n;
        }
    }
    return total * inv_n;
}

}  // namespace trisplat
