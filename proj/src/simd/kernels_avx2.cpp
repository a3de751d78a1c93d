// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// is only entered after the dispatcher has confirmed CPU support.

#include "wealthdist/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cstring>
#include <limits>

namespace wealthdist::simd::avx2 {
namespace {

// exp(x) by Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial for e^r (truncation < 1e-17 relative). 2^n is applied in two
// halves so that n = 1024 near the overflow threshold stays representable.
// Results whose exact value is subnormal are flushed to zero.
inline __m256d exp_pd(__m256d x) {
    const __m256d overflow_at = _mm256_set1_pd(709.782712893384);
    const __m256d underflow_at = _mm256_set1_pd(-708.3964185322641);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d over = _mm256_cmp_pd(x, overflow_at, _CMP_GT_OQ);
    const __m256d under = _mm256_cmp_pd(x, underflow_at, _CMP_LT_OQ);
    const __m256d unordered = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, underflow_at), overflow_at);
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);         // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));  // 1/12!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i k = _mm256_cvtpd_epi32(n);
    const __m128i k1 = _mm_srai_epi32(k, 1);
    const __m128i k2 = _mm_sub_epi32(k, k1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256d s1 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52));
    const __m256d s2 = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52));
    __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);

    result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
    result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
    result = _mm256_blendv_pd(result, x, unordered);
    return result;
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vt = _mm256_set1_pd(shift);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, exp_pd(_mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), vt)));
    }
    if (i < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        std::memcpy(buf, x + i, (n - i) * sizeof(double));
        alignas(32) double res[4];
        _mm256_store_pd(res, exp_pd(_mm256_fmadd_pd(vs, _mm256_load_pd(buf), vt)));
        std::memcpy(out + i, res, (n - i) * sizeof(double));
    }
}

void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative) {
    auto block = [&](__m256d vx, __m256d& v, __m256d& d) {
        v = _mm256_setzero_pd();
        d = _mm256_setzero_pd();
        for (std::size_t j = 0; j < terms; ++j) {
            const __m256d rj = _mm256_set1_pd(rate[j]);
            const __m256d e = _mm256_mul_pd(
                _mm256_set1_pd(weight[j]),
                exp_pd(_mm256_fmadd_pd(rj, vx, _mm256_set1_pd(offset[j]))));
            v = _mm256_add_pd(v, e);
            d = _mm256_fmadd_pd(rj, e, d);
        }
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v, d;
        block(_mm256_loadu_pd(x + i), v, d);
        _mm256_storeu_pd(value + i, v);
        if (derivative != nullptr) _mm256_storeu_pd(derivative + i, d);
    }
    if (i < n) {
        const std::size_t rem = n - i;
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        std::memcpy(buf, x + i, rem * sizeof(double));
        __m256d v, d;
        block(_mm256_load_pd(buf), v, d);
        alignas(32) double vb[4];
        alignas(32) double db[4];
        _mm256_store_pd(vb, v);
        _mm256_store_pd(db, d);
        std::memcpy(value + i, vb, rem * sizeof(double));
        if (derivative != nullptr) std::memcpy(derivative + i, db, rem * sizeof(double));
    }
}

}  // namespace wealthdist::simd::avx2
