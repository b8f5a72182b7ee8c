#pragma once

#include "trisplat/core/vec.hpp"

namespace trisplat {

// Real spherical harmonics color model, degrees 0..3. Colors are stored as
// coefficients per channel; evaluation is basis(dir) . coeffs + 0.5, clamped
// at zero.

inline constexpr int sh_basis_count(int degree) { return (degree + 1) * (degree + 1); }

inline constexpr double kShC0 = 0.28209479177387814;

// Basis values for a unit direction; fills (degree+1)^2 entries.
void sh_basis(int degree, Vec3 dir, double* out);

// Basis gradients wrt the (unnormalized-free) direction components; fills
// (degree+1)^2 entries per component.
void sh_basis_grad(int degree, Vec3 dir, double* dbx, double* dby, double* dbz);

// coeffs layout: [basis][channel], 3 channels. Returns max(0, eval + 0.5).
Vec3 sh_eval_color(int degree, const double* coeffs, Vec3 dir);

// Backward of sh_eval_color. Accumulates into dcoeffs (same layout) and
// returns dL/ddir. The zero-clamp gates gradients per channel.
Vec3 sh_eval_color_backward(int degree, const double* coeffs, Vec3 dir, Vec3 dcolor,
                            double* dcoeffs);

// DC-only coefficient that reproduces `rgb` under sh_eval_color.
inline Vec3 rgb_to_sh_dc(Vec3 rgb) { return (rgb - Vec3{0.5, 0.5, 0.5}) / kShC0; }

}  // namespace trisplat
