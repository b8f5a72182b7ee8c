#pragma once

#include <string_view>

namespace trisplat::kernels {

// Per-triangle constants for shading one row of pixels. Barycentric
// coordinates are affine in pixel coordinates: a1 = a1x*px + a1y*py + a1c,
// same for a2, a3 = 1 - a1 - a2.
struct TriangleShadeParams {
    double a1x, a1y, a1c;
    double a2x, a2y, a2c;
    double opacity;    // effective O, pre-clamp
    double two_gamma;  // 2*gamma
};

// Hot inner loops, one function-pointer table per ISA. Contract for every
// entry: output depends only on the arguments (pure), no internal threading,
// and identical results regardless of `width` of the chosen backend for the
// shade/conv entries (reductions may differ by reassociation only).
struct KernelOps {
    const char* name;

    // o_pre for n pixel centers (px0 + i, py), i in [0, n).
    void (*opacity_row)(const TriangleShadeParams& p, double px0, double py, int n, double* out);

    // 11-tap horizontal convolution over one row, symmetric-reflect edges.
    void (*conv11_h)(const double* row, int w, const double* k, double* out);

    // 11-tap vertical convolution; caller resolves the 11 (reflected) rows.
    void (*conv11_v)(const double* const rows[11], int w, const double* k, double* out);

    double (*sum_abs_diff)(const double* a, const double* b, int n);
    double (*sum_sq_diff)(const double* a, const double* b, int n);
    void (*mul_arrays)(const double* a, const double* b, double* out, int n);
};

const KernelOps& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const KernelOps& avx2_ops();  // only call if cpu_supports_avx2()
bool cpu_supports_avx2();
#endif
#if defined(__aarch64__)
const KernelOps& neon_ops();
#endif

// Runtime-selected table. Initial selection: TRISPLAT_KERNELS env var
// ("scalar", "avx2", "neon", "auto"), else the best supported ISA.
const KernelOps& active_ops();

// Returns false if the named set is unavailable on this machine.
bool set_active_ops(std::string_view name);

}  // namespace trisplat::kernels
