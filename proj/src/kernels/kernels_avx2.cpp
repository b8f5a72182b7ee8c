// Compiled with -mavx2 -mfma; only dispatch.cpp decides whether to call it.

#include "trisplat/kernels/kernel_impl.hpp"

#if !defined(__AVX2__) || !defined(__FMA__)
#error "kernels_avx2.cpp must be built with -mavx2 -mfma"
#endif

namespace trisplat::kernels {

const KernelOps& avx2_ops() {
    static const KernelOps ops = detail::make_ops<Avx2Backend>("avx2");
    return ops;
}

bool cpu_supports_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace trisplat::kernels
