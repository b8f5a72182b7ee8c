#include "trisplat/kernels/kernel_impl.hpp"

namespace trisplat::kernels {

const KernelOps& scalar_ops() {
    static const KernelOps ops = detail::make_ops<ScalarBackend>("scalar");
    return ops;
}

}  // namespace trisplat::kernels
