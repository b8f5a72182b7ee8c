#pragma once

#include "trisplat/kernels/backends.hpp"

// exp/log/pow over lane backends. One algorithm shared by every ISA so the
// renderer's transcendental results do not depend on which kernel set is
// active. Accuracy is a few ulp over the ranges the engine uses.

namespace trisplat::kernels {

namespace lane_const {
inline constexpr double inv_ln2 = 1.4426950408889634074;
inline constexpr double ln2_hi = 6.93147180369123816490e-01;
inline constexpr double ln2_lo = 1.90821492927058770002e-10;
inline constexpr double sqrt2 = 1.4142135623730951;
inline constexpr double exp_underflow = -708.0;
inline constexpr double exp_clamp_hi = 709.0;
// Sentinel for log(x<=0); large enough that exp(y*log0) underflows for any
// exponent y >= 1e-6 used by callers.
inline constexpr double log_zero = -1.0e30;
inline constexpr double dbl_min_normal = 2.2250738585072014e-308;
}  // namespace lane_const

// exp(x) with underflow-to-zero below -708; inputs above 709 are clamped.
template <class B>
inline typename B::vd lane_exp(typename B::vd x) {
    using vd = typename B::vd;
    namespace c = lane_const;
    typename B::mask under = B::lt(x, B::set1(c::exp_underflow));
    x = B::min(x, B::set1(c::exp_clamp_hi));
    vd n = B::round_nearest(B::mul(x, B::set1(c::inv_ln2)));
    vd r = B::fma(n, B::set1(-c::ln2_hi), x);
    r = B::fma(n, B::set1(-c::ln2_lo), r);
    // Taylor polynomial of degree 12, Horner with fma. |r| <= ln2/2.
    vd p = B::set1(2.08767569878680989792e-09);   // 1/12!
    p = B::fma(p, r, B::set1(2.50521083854417187751e-08));  // 1/11!
    p = B::fma(p, r, B::set1(2.75573192239858906526e-07));  // 1/10!
    p = B::fma(p, r, B::set1(2.75573192239858925110e-06));  // 1/9!
    p = B::fma(p, r, B::set1(2.48015873015873015873e-05));  // 1/8!
    p = B::fma(p, r, B::set1(1.98412698412698412526e-04));  // 1/7!
    p = B::fma(p, r, B::set1(1.38888888888888894068e-03));  // 1/6!
    p = B::fma(p, r, B::set1(8.33333333333333321769e-03));  // 1/5!
    p = B::fma(p, r, B::set1(4.16666666666666643537e-02));  // 1/4!
    p = B::fma(p, r, B::set1(1.66666666666666657415e-01));  // 1/3!
    p = B::fma(p, r, B::set1(5.0e-01));
    p = B::fma(p, r, B::set1(1.0));
    p = B::fma(p, r, B::set1(1.0));
    // Scale by 2^n through the exponent field; n in [-1022, 1024] here.
    typename B::vi scale_bits = B::shl52(B::iadd(B::to_int(n), B::iset1(1023)));
    vd res = B::mul(p, B::from_bits(scale_bits));
    return B::select(under, B::set1(0.0), res);
}

// log(x) for finite x; x < DBL_MIN (including 0 and negatives) yields the
// log_zero sentinel instead of -inf/NaN.
template <class B>
inline typename B::vd lane_log(typename B::vd x) {
    using vd = typename B::vd;
    namespace c = lane_const;
    typename B::mask tiny = B::lt(x, B::set1(c::dbl_min_normal));
    vd xs = B::max(x, B::set1(c::dbl_min_normal));
    typename B::vi bits = B::to_bits(xs);
    typename B::vi exp_biased = B::shr52_logical(bits);
    typename B::vi mant_bits =
        B::ior(B::iand(bits, B::iset1(0x000FFFFFFFFFFFFFll)), B::iset1(0x3FF0000000000000ll));
    vd m = B::from_bits(mant_bits);  // [1, 2)
    // Biased exponent as double via the 2^52 shift trick (value in [1, 2046]).
    vd e = B::sub(B::from_bits(B::ior(exp_biased, B::iset1(0x4330000000000000ll))),
                  B::set1(4503599627370496.0));
    e = B::sub(e, B::set1(1023.0));
    typename B::mask big = B::gt(m, B::set1(c::sqrt2));
    m = B::select(big, B::mul(m, B::set1(0.5)), m);
    e = B::select(big, B::add(e, B::set1(1.0)), e);
    vd s = B::div(B::sub(m, B::set1(1.0)), B::add(m, B::set1(1.0)));
    vd z = B::mul(s, s);
    // atanh series: log m = 2s * sum z^k/(2k+1), |s| <= sqrt2-1 / sqrt2+1.
    vd w = B::set1(1.0 / 21.0);
    w = B::fma(w, z, B::set1(1.0 / 19.0));
    w = B::fma(w, z, B::set1(1.0 / 17.0));
    w = B::fma(w, z, B::set1(1.0 / 15.0));
    w = B::fma(w, z, B::set1(1.0 / 13.0));
    w = B::fma(w, z, B::set1(1.0 / 11.0));
    w = B::fma(w, z, B::set1(1.0 / 9.0));
    w = B::fma(w, z, B::set1(1.0 / 7.0));
    w = B::fma(w, z, B::set1(1.0 / 5.0));
    w = B::fma(w, z, B::set1(1.0 / 3.0));
    w = B::fma(w, z, B::set1(1.0));
    vd lnm = B::mul(B::mul(B::set1(2.0), s), w);
    vd res = B::add(B::fma(e, B::set1(c::ln2_hi), lnm), B::mul(e, B::set1(c::ln2_lo)));
    return B::select(tiny, B::set1(c::log_zero), res);
}

// x^y for x >= 0, y > 0; pow(0, y) = 0.
template <class B>
inline typename B::vd lane_pow_pos(typename B::vd x, typename B::vd y) {
    return lane_exp<B>(B::mul(y, lane_log<B>(x)));
}

}  // namespace trisplat::kernels
