#pragma once

#include <functional>

namespace wealthdist::numerics {

/// Root of a continuous f on [lo, hi] with f(lo)*f(hi) <= 0 (TOMS 748).
///
/// Stops once the bracket is no wider than tol (or a few ulps, whichever is
/// larger) and returns the bracket end with the smaller |f|.
/// Throws NoSignChange, MaxIterations.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-12, int max_iter = 200);

/// x in [lo, hi] with |f(x) - y| <= tol * max(1, |y|) for strictly increasing f.
/// Throws OutOfRange when y lies outside [f(lo), f(hi)].
double monotone_inverse(const std::function<double(double)>& f, double y, double lo, double hi,
                        double tol = 1e-12);

/// As monotone_inverse, but grows the bracket [guess - step, guess + step]
/// geometrically until it contains y. Throws OutOfRange after max_expansions.
double monotone_inverse_unbounded(const std::function<double(double)>& f, double y, double guess,
                                  double step = 1.0, double tol = 1e-12, int max_expansions = 60);

}  // namespace wealthdist::numerics
