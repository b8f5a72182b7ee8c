#include "trisplat/scene/sh.hpp"

#include <algorithm>

namespace trisplat {
namespace {

constexpr double C1 = 0.4886025119029199;
constexpr double C2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double C3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                          0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

}  // namespace

void sh_basis(int degree, Vec3 dir, double* out) {
    const double x = dir.x, y = dir.y, z = dir.z;
    out[0] = kShC0;
    if (degree < 1) return;
    out[1] = -C1 * y;
    out[2] = C1 * z;
    out[3] = -C1 * x;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    out[4] = C2[0] * xy;
    out[5] = C2[1] * yz;
    out[6] = C2[2] * (2.0 * zz - xx - yy);
    out[7] = C2[3] * xz;
    out[8] = C2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = C3[0] * y * (3.0 * xx - yy);
    out[10] = C3[1] * xy * z;
    out[11] = C3[2] * y * (4.0 * zz - xx - yy);
    out[12] = C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = C3[4] * x * (4.0 * zz - xx - yy);
    out[14] = C3[5] * z * (xx - yy);
    out[15] = C3[6] * x * (xx - 3.0 * yy);
}

void sh_basis_grad(int degree, Vec3 dir, double* dbx, double* dby, double* dbz) {
    const double x = dir.x, y = dir.y, z = dir.z;
    const int n = sh_basis_count(degree);
    std::fill(dbx, dbx + n, 0.0);
    std::fill(dby, dby + n, 0.0);
    std::fill(dbz, dbz + n, 0.0);
    if (degree < 1) return;
    dby[1] = -C1;
    dbz[2] = C1;
    dbx[3] = -C1;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    dbx[4] = C2[0] * y;
    dby[4] = C2[0] * x;
    dby[5] = C2[1] * z;
    dbz[5] = C2[1] * y;
    dbx[6] = C2[2] * (-2.0 * x);
    dby[6] = C2[2] * (-2.0 * y);
    dbz[6] = C2[2] * (4.0 * z);
    dbx[7] = C2[3] * z;
    dbz[7] = C2[3] * x;
    dbx[8] = C2[4] * (2.0 * x);
    dby[8] = C2[4] * (-2.0 * y);
    if (degree < 3) return;
    dbx[9] = C3[0] * y * 6.0 * x;
    dby[9] = C3[0] * (3.0 * xx - 3.0 * yy);
    dbx[10] = C3[1] * y * z;
    dby[10] = C3[1] * x * z;
    dbz[10] = C3[1] * x * y;
    dbx[11] = C3[2] * y * (-2.0 * x);
    dby[11] = C3[2] * (4.0 * zz - xx - 3.0 * yy);
    dbz[11] = C3[2] * y * 8.0 * z;
    dbx[12] = C3[3] * z * (-6.0 * x);
    dby[12] = C3[3] * z * (-6.0 * y);
    dbz[12] = C3[3] * (6.0 * zz - 3.0 * xx - 3.0 * yy);
    dbx[13] = C3[4] * (4.0 * zz - 3.0 * xx - yy);
    dby[13] = C3[4] * x * (-2.0 * y);
    dbz[13] = C3[4] * x * 8.0 * z;
    dbx[14] = C3[5] * z * 2.0 * x;
    dby[14] = C3[5] * z * (-2.0 * y);
    dbz[14] = C3[5] * (xx - yy);
    dbx[15] = C3[6] * (3.0 * xx - 3.0 * yy);
    dby[15] = C3[6] * x * (-6.0 * y);
}

Vec3 sh_eval_color(int degree, const double* coeffs, Vec3 dir) {
    double basis[16];
    sh_basis(degree, dir, basis);
    const int n = sh_basis_count(degree);
    Vec3 c{0.5, 0.5, 0.5};
    for (int b = 0; b < n; ++b) {
        c.x += basis[b] * coeffs[b * 3 + 0];
        c.y += basis[b] * coeffs[b * 3 + 1];
        c.z += basis[b] * coeffs[b * 3 + 2];
    }
    return {std::max(0.0, c.x), std::max(0.0, c.y), std::max(0.0, c.z)};
}

Vec3 sh_eval_color_backward(int degree, const double* coeffs, Vec3 dir, Vec3 dcolor,
                            double* dcoeffs) {
    double basis[16], dbx[16], dby[16], dbz[16];
    sh_basis(degree, dir, basis);
    sh_basis_grad(degree, dir, dbx, dby, dbz);
    const int n = sh_basis_count(degree);
    // Re-evaluate the pre-clamp channels so the clamp can gate gradients.
    Vec3 pre{0.5, 0.5, 0.5};
    for (int b = 0; b < n; ++b) {
        pre.x += basis[b] * coeffs[b * 3 + 0];
        pre.y += basis[b] * coeffs[b * 3 + 1];
        pre.z += basis[b] * coeffs[b * 3 + 2];
    }
    const Vec3 g{pre.x > 0.0 ? dcolor.x : 0.0, pre.y > 0.0 ? dcolor.y : 0.0,
                 pre.z > 0.0 ? dcolor.z : 0.0};
    Vec3 ddir{};
    for (int b = 0; b < n; ++b) {
        dcoeffs[b * 3 + 0] += basis[b] * g.x;
        dcoeffs[b * 3 + 1] += basis[b] * g.y;
        dcoeffs[b * 3 + 2] += basis[b] * g.z;
        const double gc =
            g.x * coeffs[b * 3 + 0] + g.y * coeffs[b * 3 + 1] + g.z * coeffs[b * 3 + 2];
        ddir.x += gc * dbx[b];
        ddir.y += gc * dby[b];
        ddir.z += gc * dbz[b];
    }
    return ddir;
}

}  // namespace trisplat
