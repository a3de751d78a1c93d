#include "wealthdist/simd/kernels.hpp"

#include <cmath>

namespace wealthdist::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(scale * x[i] + shift);
}

void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        double d = 0.0;
        for (std::size_t j = 0; j < terms; ++j) {
            const double e = weight[j] * std::exp(rate[j] * x[i] + offset[j]);
            v += e;
            d += rate[j] * e;
        }
        value[i] = v;
        if (derivative != nullptr) derivative[i] = d;
    }
}

}  // namespace wealthdist::simd::scalar
