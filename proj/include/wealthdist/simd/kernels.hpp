#pragma once

// Data-parallel inner loops used by the engines and the path simulator.
//
// Every kernel has a scalar reference implementation. AVX2+FMA (x86-64) and
// NEON (aarch64) variants are compiled into their own translation units and
// selected once at runtime; WEALTHDIST_SIMD=scalar|avx2|neon overrides the
// choice. Variants agree with the scalar reference to a few ulps, not bitwise:
// the vector exp is a polynomial, and dot products reassociate the sum.

#include <cstddef>
#include <span>
#include <string_view>

namespace wealthdist::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// Function table for one instruction set.
struct KernelTable {
    Isa isa;

    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    /// out[i] = exp(scale * x[i] + shift)
    void (*exp_affine)(const double* x, std::size_t n, double scale, double shift, double* out);

    /// value[i] = sum_j weight[j] * exp(rate[j] * x[i] + offset[j]);
    /// derivative[i] = sum_j weight[j] * rate[j] * exp(...). derivative may be null.
    void (*exp_sum)(const double* x, std::size_t n, const double* weight, const double* rate,
                    const double* offset, std::size_t terms, double* value, double* derivative);
};

/// True when the running CPU (and this build) can execute `isa`.
bool supported(Isa isa) noexcept;

/// Kernels for a specific instruction set; throws std::invalid_argument if unsupported.
const KernelTable& kernels_for(Isa isa);

/// Kernels selected for this process (env override, then best supported ISA).
const KernelTable& active() noexcept;

// Convenience wrappers over active().

double dot(std::span<const double> a, std::span<const double> b);

void exp_affine(std::span<const double> x, double scale, double shift, std::span<double> out);

void exp_sum(std::span<const double> x, std::span<const double> weight,
             std::span<const double> rate, std::span<const double> offset,
             std::span<double> value, std::span<double> derivative = {});

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out);
void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out);
void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void exp_affine(const double* x, std::size_t n, double scale, double shift, double* out);
void exp_sum(const double* x, std::size_t n, const double* weight, const double* rate,
             const double* offset, std::size_t terms, double* value, double* derivative);
}  // namespace neon
#endif

}  // namespace wealthdist::simd
