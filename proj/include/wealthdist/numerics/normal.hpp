#pragma once

namespace wealthdist::numerics {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal distribution function, accurate in both tails.
double normal_cdf(double x) noexcept;

/// Inverse of normal_cdf. Returns -inf at 0 and +inf at 1.
double normal_quantile(double p);

}  // namespace wealthdist::numerics
