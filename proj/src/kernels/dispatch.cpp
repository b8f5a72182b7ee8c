#include <atomic>
#include <cstdlib>
#include <string_view>

#include "trisplat/kernels/kernels.hpp"

namespace trisplat::kernels {
namespace {

const KernelOps* best_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_supports_avx2()) return &avx2_ops();
#endif
#if defined(__aarch64__)
    return &neon_ops();
#endif
    return &scalar_ops();
}

const KernelOps* lookup(std::string_view name) {
    if (name == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2" && cpu_supports_avx2()) return &avx2_ops();
#endif
#if defined(__aarch64__)
    if (name == "neon") return &neon_ops();
#endif
    if (name == "auto") return best_supported();
    return nullptr;
}

std::atomic<const KernelOps*>& active_slot() {
    static std::atomic<const KernelOps*> slot{[]() -> const KernelOps* {
        if (const char* env = std::getenv("TRISPLAT_KERNELS")) {
            if (const KernelOps* ops = lookup(env)) return ops;
        }
        return best_supported();
    }()};
    return slot;
}

}  // namespace

const KernelOps& active_ops() { return *active_slot().load(std::memory_order_acquire); }

bool set_active_ops(std::string_view name) {
    const KernelOps* ops = lookup(name);
    if (!ops) return false;
    active_slot().store(ops, std::memory_order_release);
    return true;
}

}  // namespace trisplat::kernels
