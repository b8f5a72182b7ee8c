#include "trisplat/losses/photometric.hpp"

#include <cmath>

#include "trisplat/kernels/kernels.hpp"
#include "trisplat/losses/ssim.hpp"

namespace trisplat {

double mean_abs_diff(const Image& a, const Image& b) {
    a.require_shape(b, "mean_abs_diff");
    const auto& ops = kernels::active_ops();
    const size_t n = a.size();
    // Fixed 4096-element blocks summed in order: thread-count independent.
    constexpr size_t kBlock = 4096;
    double total = 0.0;
    for (size_t i = 0; i < n; i += kBlock) {
        const int len = static_cast<int>(std::min(kBlock, n - i));
        total += ops.sum_abs_diff(a.data() + i, b.data() + i, len);
    }
    return total / static_cast<double>(n);
}

PhotometricParts photometric_loss(const Image& rendered, const Image& ground_truth) {
    PhotometricParts parts;
    parts.l1 = mean_abs_diff(rendered, ground_truth);
    parts.ssim_loss = 1.0 - ssim(rendered, ground_truth);
    return parts;
}

PhotometricParts photometric_loss_backward(const Image& rendered, const Image& ground_truth,
                                           double w_l1, double w_ssim, Image* d_rendered) {
    PhotometricParts parts;
    parts.l1 = mean_abs_diff(rendered, ground_truth);
    Image d_ssim;
    parts.ssim_loss = 1.0 - ssim(rendered, ground_truth, &d_ssim);
    if (d_rendered) {
        *d_rendered = Image(rendered.height(), rendered.width(), rendered.channels());
        const size_t n = rendered.size();
        const double inv_n = 1.0 / static_cast<double>(n);
        const double* r = rendered.data();
        const double* g = ground_truth.data();
        const double* ds = d_ssim.data();
        double* out = d_rendered->data();
        for (size_t i = 0; i < n; ++i) {
            const double diff = r[i] - g[i];
            const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            out[i] = w_l1 * sign * inv_n - w_ssim * ds[i];
        }
    }
    return parts;
}

}  // namespace trisplat
