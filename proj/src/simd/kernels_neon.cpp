// NEON variants for aarch64. Same reduction and polynomial as the AVX2 path.

#include "wealthdist/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstring>
#include <limits>

namespace wealthdist::simd::neon {
namespace {

inline float64x2_t exp_pd(float64x2_t x) {
    const float64x2_t overflow_at = vdupq_n_f64(709.782712893384);
    const float64x2_t underflow_at = vdupq_n_f64(-708.3964185322641);
    const float64x2_t log2e = vdupq_n_f64(1.4426950408889634074);
    const float64x2_t ln2_hi = vdupq_n_f64(6.93145751953125e-1);
    const float64x2_t ln2_lo = vdupq_n_f64(1.42860682030941723212e-6);

    const uint64x2_t over = vcgtq_f64(x, overflow_at);
    const uint64x2_t under = vcltq_f64(x, underflow_at);
    const uint64x2_t ordered = vceqq_f64(x, x);

    const float64x2_t xc = vminq_f64(vmaxq_f64(x, underflow_at), overflow_at);
    const float64x2_t n = vrndnq_f64(vmulq_f64(xc, log2e));
    float64x2_t r = vfmsq_f64(xc, n, ln2_hi);
    r = vfmsq_f64(r, n, ln2_lo);

    static constexpr double coeff[] = {
        1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,     1.0 / 120.0,
        1.0 / 24.0,        1.0 / 6.0,        0.5,             1.0,
        1.0};
    float64x2_t p = vdupq_n_f64(1.0 / 6227020800.0);
    for (double c : coeff) p = vfmaq_f64(vdupq_n_f64(c), p, r);

    const int64x2_t k = vcvtq_s64_f64(n);
    const int64x2_t k1 = vshrq_n_s64(k, 1);
    const int64x2_t k2 = vsubq_s64(k, k1);
    const int64x2_t bias = vdupq_n_s64(1023);
    const float64x2_t s1 = vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(k1, bias), 52));
    const float64x2_t s2 = vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(k2, bias), 52));
    float64x2_t result = vmulq_f64(vmulq_f64(p, s1), s2);

    result = vbslq_f64(over, vdupq_n_f64(std::numeric_limits<double>::infinity()), result);
    result = vbslq_f64(under, vdupq_n_f64(0.0), result);
    result = vbslq_f64(ordered, result, x);
    return result;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out) {
    const float64x2_t vs = vdupq_n_f64(scale);
    const float64x2_t vt = vdupq_n_f64(shift);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, exp_pd(vfmaq_f64(vt, vs, vld1q_f64(x + i))));
    }
    if (i < n) {
        double buf[2] = {x[i], 0.0};
        double res[2];
        vst1q_f64(res, exp_pd(vfmaq_f64(vt, vs, vld1q_f64(buf))));
        out[i] = res[0];
    }
}

void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative) {
    auto block = [&](float64x2_t vx, float64x2_t& v, float64x2_t& d) {
        v = vdupq_n_f64(0.0);
        d = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < terms; ++j) {
            const float64x2_t rj = vdupq_n_f64(rate[j]);
            const float64x2_t e = vmulq_f64(
                vdupq_n_f64(weight[j]), exp_pd(vfmaq_f64(vdupq_n_f64(offset[j]), rj, vx)));
            v = vaddq_f64(v, e);
            d = vfmaq_f64(d, rj, e);
        }
    };
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v, d;
        block(vld1q_f64(x + i), v, d);
        vst1q_f64(value + i, v);
        if (derivative != nullptr) vst1q_f64(derivative + i, d);
    }
    if (i < n) {
        double buf[2] = {x[i], 0.0};
        float64x2_t v, d;
        block(vld1q_f64(buf), v, d);
        double vb[2];
        double db[2];
        vst1q_f64(vb, v);
        vst1q_f64(db, d);
        value[i] = vb[0];
        if (derivative != nullptr) derivative[i] = db[0];
    }
}

}  // namespace wealthdist::simd::neon

#endif
