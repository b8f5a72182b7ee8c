#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

// Lane backends. Every kernel body is written once against this interface and
// instantiated per ISA in its own translation unit. Arithmetic must map 1:1
// onto correctly rounded machine ops (add/sub/mul/div/min/max/fma) so the
// scalar and SIMD instantiations produce bit-identical lanes; the project is
// compiled with -ffp-contract=off to keep the scalar path from fusing on its
// own.

namespace trisplat::kernels {

struct ScalarBackend {
    static constexpr int width = 1;
    using vd = double;
    using vi = int64_t;
    using mask = bool;

    static vd load(const double* p) { return *p; }
    static void store(double* p, vd v) { *p = v; }
    static vd set1(double x) { return x; }
    static vd add(vd a, vd b) { return a + b; }
    static vd sub(vd a, vd b) { return a - b; }
    static vd mul(vd a, vd b) { return a * b; }
    static vd div(vd a, vd b) { return a / b; }
    static vd fma(vd a, vd b, vd c) { return std::fma(a, b, c); }
    static vd min(vd a, vd b) { return a < b ? a : b; }
    static vd max(vd a, vd b) { return a > b ? a : b; }
    static vd abs(vd a) { return std::fabs(a); }
    static vd round_nearest(vd a) { return std::nearbyint(a); }
    static mask lt(vd a, vd b) { return a < b; }
    static mask gt(vd a, vd b) { return a > b; }
    static vd select(mask m, vd a, vd b) { return m ? a : b; }

    static vi to_bits(vd a) {
        vi r;
        std::memcpy(&r, &a, 8);
        return r;
    }
    static vd from_bits(vi a) {
        vd r;
        std::memcpy(&r, &a, 8);
        return r;
    }
    static vi iadd(vi a, vi b) { return a + b; }
    static vi iand(vi a, vi b) { return a & b; }
    static vi ior(vi a, vi b) { return a | b; }
    static vi iset1(int64_t x) { return x; }
    static vi shl52(vi a) { return a << 52; }
    static vi shr52_logical(vi a) { return static_cast<int64_t>(static_cast<uint64_t>(a) >> 52); }
    // Rounded double -> int64 (value already integral).
    static vi to_int(vd a) { return static_cast<int64_t>(a); }

    static vd lane_ramp() { return 0.0; }  // {0}
    static double hsum(vd a) { return a; }
};

#if defined(__AVX2__) && defined(__FMA__)
struct Avx2Backend {
    static constexpr int width = 4;
    using vd = __m256d;
    using vi = __m256i;
    using mask = __m256d;

    static vd load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, vd v) { _mm256_storeu_pd(p, v); }
    static vd set1(double x) { return _mm256_set1_pd(x); }
    static vd add(vd a, vd b) { return _mm256_add_pd(a, b); }
    static vd sub(vd a, vd b) { return _mm256_sub_pd(a, b); }
    static vd mul(vd a, vd b) { return _mm256_mul_pd(a, b); }
    static vd div(vd a, vd b) { return _mm256_div_pd(a, b); }
    static vd fma(vd a, vd b, vd c) { return _mm256_fmadd_pd(a, b, c); }
    // MINPD/MAXPD return the second operand on ties, matching a<b?a:b.
    static vd min(vd a, vd b) { return _mm256_min_pd(a, b); }
    static vd max(vd a, vd b) { return _mm256_max_pd(a, b); }
    static vd abs(vd a) {
        return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a);
    }
    static vd round_nearest(vd a) {
        return _mm256_round_pd(a, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    }
    static mask lt(vd a, vd b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
    static mask gt(vd a, vd b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
    static vd select(mask m, vd a, vd b) { return _mm256_blendv_pd(b, a, m); }

    static vi to_bits(vd a) { return _mm256_castpd_si256(a); }
    static vd from_bits(vi a) { return _mm256_castsi256_pd(a); }
    static vi iadd(vi a, vi b) { return _mm256_add_epi64(a, b); }
    static vi iand(vi a, vi b) { return _mm256_and_si256(a, b); }
    static vi ior(vi a, vi b) { return _mm256_or_si256(a, b); }
    static vi iset1(int64_t x) { return _mm256_set1_epi64x(x); }
    static vi shl52(vi a) { return _mm256_slli_epi64(a, 52); }
    static vi shr52_logical(vi a) { return _mm256_srli_epi64(a, 52); }
    static vi to_int(vd a) {
        // |a| < 2^51: shift into the mantissa of 1.5*2^52 and strip the bias.
        const vd magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
        vi b = to_bits(_mm256_add_pd(a, magic));
        return _mm256_sub_epi64(b, to_bits(magic));
    }

    static vd lane_ramp() { return _mm256_setr_pd(0.0, 1.0, 2.0, 3.0); }
    static double hsum(vd a) {
        alignas(32) double t[4];
        _mm256_store_pd(t, a);
        return (t[0] + t[1]) + (t[2] + t[3]);
    }
};
#endif  // __AVX2__ && __FMA__

#if defined(__aarch64__)
struct NeonBackend {
    static constexpr int width = 2;
    using vd = float64x2_t;
    using vi = int64x2_t;
    using mask = uint64x2_t;

    static vd load(const double* p) { return vld1q_f64(p); }
    static void store(double* p, vd v) { vst1q_f64(p, v); }
    static vd set1(double x) { return vdupq_n_f64(x); }
    static vd add(vd a, vd b) { return vaddq_f64(a, b); }
    static vd sub(vd a, vd b) { return vsubq_f64(a, b); }
    static vd mul(vd a, vd b) { return vmulq_f64(a, b); }
    static vd div(vd a, vd b) { return vdivq_f64(a, b); }
    static vd fma(vd a, vd b, vd c) { return vfmaq_f64(c, a, b); }
    static vd min(vd a, vd b) { return vminq_f64(a, b); }
    static vd max(vd a, vd b) { return vmaxq_f64(a, b); }
    static vd abs(vd a) { return vabsq_f64(a); }
    static vd round_nearest(vd a) { return vrndnq_f64(a); }
    static mask lt(vd a, vd b) { return vcltq_f64(a, b); }
    static mask gt(vd a, vd b) { return vcgtq_f64(a, b); }
    static vd select(mask m, vd a, vd b) { return vbslq_f64(m, a, b); }

    static vi to_bits(vd a) { return vreinterpretq_s64_f64(a); }
    static vd from_bits(vi a) { return vreinterpretq_f64_s64(a); }
    static vi iadd(vi a, vi b) { return vaddq_s64(a, b); }
    static vi iand(vi a, vi b) { return vandq_s64(a, b); }
    static vi ior(vi a, vi b) { return vorrq_s64(a, b); }
    static vi iset1(int64_t x) { return vdupq_n_s64(x); }
    static vi shl52(vi a) { return vshlq_n_s64(a, 52); }
    static vi shr52_logical(vi a) {
        return vreinterpretq_s64_u64(vshrq_n_u64(vreinterpretq_u64_s64(a), 52));
    }
    static vi to_int(vd a) { return vcvtnq_s64_f64(a); }

    static vd lane_ramp() {
        const double r[2] = {0.0, 1.0};
        return vld1q_f64(r);
    }
    static double hsum(vd a) { return vgetq_lane_f64(a, 0) + vgetq_lane_f64(a, 1); }
};
#endif  // __aarch64__

}  // namespace trisplat::kernels
