#include "trisplat/metrics/psnr.hpp"

#include <algorithm>
#include <cmath>

#include "trisplat/kernels/kernels.hpp"

namespace trisplat {

double mean_squared_error(const Image& a, const Image& b) {
    a.require_shape(b, "mean_squared_error");
    const auto& ops = kernels::active_ops();
    const size_t n = a.size();
    constexpr size_t kBlock = 4096;
    double total = 0.0;
    for (size_t i = 0; i < n; i += kBlock) {
        const int len = static_cast<int>(std::min(kBlock, n - i));
        total += ops.sum_sq_diff(a.data() + i, b.data() + i, len);
    }
    return total / static_cast<double>(n);
}

double psnr(const Image& a, const Image& b) {
    const double mse = mean_squared_error(a, b);
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

}  // namespace trisplat
