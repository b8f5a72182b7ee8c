#include "trisplat/kernels/kernel_impl.hpp"

#if !defined(__aarch64__)
#error "kernels_neon.cpp is aarch64-only"
#endif

namespace trisplat::kernels {

const KernelOps& neon_ops() {
    static const KernelOps ops = detail::make_ops<NeonBackend>("neon");
    return ops;
}

}  // namespace trisplat::kernels
