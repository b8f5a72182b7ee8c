#pragma once

#include "trisplat/kernels/kernels.hpp"
#include "trisplat/kernels/lane_math.hpp"

// Kernel bodies, templated on the lane backend. Each ISA translation unit
// instantiates `make_ops<Backend>()`. Vector main loops hand their remainder
// to the ScalarBackend instantiation of the same body, so a row produces the
// same bits no matter which backend ran it.

namespace trisplat::kernels::detail {

template <class B>
void opacity_row_impl(const TriangleShadeParams& p, double px0, double py, int n, double* out) {
    using vd = typename B::vd;
    // Row-constant parts, computed in shared scalar code.
    const double c1 = p.a1y * py + p.a1c;
    const double c2 = p.a2y * py + p.a2c;
    const vd va1x = B::set1(p.a1x), va2x = B::set1(p.a2x);
    const vd vc1 = B::set1(c1), vc2 = B::set1(c2);
    const vd one = B::set1(1.0), zero = B::set1(0.0);
    const vd neg3 = B::set1(-3.0);
    const vd vo = B::set1(p.opacity), vtg = B::set1(p.two_gamma);
    const vd vhalfneg = B::set1(-0.5);

    vd px = B::add(B::set1(px0), B::lane_ramp());
    const vd step = B::set1(static_cast<double>(B::width));
    int i = 0;
    for (; i + B::width <= n; i += B::width) {
        vd a1 = B::fma(va1x, px, vc1);
        vd a2 = B::fma(va2x, px, vc2);
        vd a3 = B::sub(B::sub(one, a1), a2);
        vd amin = B::min(a1, B::min(a2, a3));
        vd e = B::max(B::fma(neg3, amin, one), zero);
        vd t = lane_pow_pos<B>(e, vtg);
        vd o = B::mul(vo, lane_exp<B>(B::mul(vhalfneg, t)));
        B::store(out + i, o);
        px = B::add(px, step);
    }
    if constexpr (B::width > 1) {
        if (i < n) opacity_row_impl<ScalarBackend>(p, px0 + i, py, n - i, out + i);
    }
}

// Reflect index into [0, n): -1 -> 0, -2 -> 1, n -> n-1, ...
inline int reflect_index(int i, int n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

inline double conv11_one_reflect(const double* row, int w, const double* k, int x) {
    double acc = k[0] * row[reflect_index(x - 5, w)];
    for (int j = 1; j < 11; ++j) acc = std::fma(k[j], row[reflect_index(x - 5 + j, w)], acc);
    return acc;
}

template <class B>
void conv11_h_impl(const double* row, int w, const double* k, double* out) {
    int lo = w < 5 ? w : 5;
    for (int x = 0; x < lo; ++x) out[x] = conv11_one_reflect(row, w, k, x);
    int hi = w - 5 > lo ? w - 5 : lo;
    int x = lo;
    for (; x + B::width <= hi; x += B::width) {
        typename B::vd acc = B::mul(B::set1(k[0]), B::load(row + x - 5));
        for (int j = 1; j < 11; ++j)
            acc = B::fma(B::set1(k[j]), B::load(row + x - 5 + j), acc);
        B::store(out + x, acc);
    }
    for (; x < hi; ++x) {
        double acc = k[0] * row[x - 5];
        for (int j = 1; j < 11; ++j) acc = std::fma(k[j], row[x - 5 + j], acc);
        out[x] = acc;
    }
    for (x = hi; x < w; ++x) out[x] = conv11_one_reflect(row, w, k, x);
}

template <class B>
void conv11_v_impl(const double* const rows[11], int w, const double* k, double* out) {
    int x = 0;
    for (; x + B::width <= w; x += B::width) {
        typename B::vd acc = B::mul(B::set1(k[0]), B::load(rows[0] + x));
        for (int j = 1; j < 11; ++j) acc = B::fma(B::set1(k[j]), B::load(rows[j] + x), acc);
        B::store(out + x, acc);
    }
    for (; x < w; ++x) {
        double acc = k[0] * rows[0][x];
        for (int j = 1; j < 11; ++j) acc = std::fma(k[j], rows[j][x], acc);
        out[x] = acc;
    }
}

template <class B>
double sum_abs_diff_impl(const double* a, const double* b, int n) {
    typename B::vd acc = B::set1(0.0);
    int i = 0;
    for (; i + B::width <= n; i += B::width)
        acc = B::add(acc, B::abs(B::sub(B::load(a + i), B::load(b + i))));
    double total = B::hsum(acc);
    for (; i < n; ++i) total += std::fabs(a[i] - b[i]);
    return total;
}

template <class B>
double sum_sq_diff_impl(const double* a, const double* b, int n) {
    typename B::vd acc = B::set1(0.0);
    int i = 0;
    for (; i + B::width <= n; i += B::width) {
        typename B::vd d = B::sub(B::load(a + i), B::load(b + i));
        acc = B::fma(d, d, acc);
    }
    double total = B::hsum(acc);
    for (; i < n; ++i) total = std::fma(a[i] - b[i], a[i] - b[i], total);
    return total;
}

template <class B>
void mul_arrays_impl(const double* a, const double* b, double* out, int n) {
    int i = 0;
    for (; i + B::width <= n; i += B::width)
        B::store(out + i, B::mul(B::load(a + i), B::load(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

template <class B>
KernelOps make_ops(const char* name) {
    KernelOps ops;
    ops.name = name;
    ops.opacity_row = &opacity_row_impl<B>;
    ops.conv11_h = &conv11_h_impl<B>;
    ops.conv11_v = &conv11_v_impl<B>;
    ops.sum_abs_diff = &sum_abs_diff_impl<B>;
    ops.sum_sq_diff = &sum_sq_diff_impl<B>;
    ops.mul_arrays = &mul_arrays_impl<B>;
    return ops;
}

}  // namespace trisplat::kernels::detail
