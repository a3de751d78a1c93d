#pragma once
// Shared markets and oracles for the test suites.

#include "wealthdist/distributions.hpp"
#include "wealthdist/market.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wealthdist::testing {

/// One asset, r = 0, sigma = 1 and drift lambda, so |lambda| = lambda.
inline MarketCurves flat_market(double lambda = 0.2, double horizon = 1.0) {
    return MarketCurves(MarketSpec::black_scholes(0.0, lambda, 1.0, horizon));
}

/// Lognormal budget e^{b/2 - sqrt(b A)}.
inline double lognormal_budget(double b, double A) { return std::exp(b / 2.0 - std::sqrt(b * A)); }

/// Transformed-normal budget: Q(z) = e^{2 sqrt(b) z} + 2 e^{sqrt(b) z} under the shift -sqrt(A).
inline double transformed_budget(double b, double A) {
    return std::exp(2.0 * b - 2.0 * std::sqrt(b * A)) + 2.0 * lognormal_budget(b, A);
}

/// Closed-form lognormal parameter: (sqrt(A) + sqrt(A + 2 log x0))^2.
inline double lognormal_parameter(double x0, double A) {
    const double s = std::sqrt(A) + std::sqrt(std::max(0.0, A + 2.0 * std::log(x0)));
    return s * s;
}

/// Evenly spaced points on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

/// Marker levels drawn as the midpoint quantiles of a lognormal with log-sd s.
std::vector<double> lognormal_markers(int N, double s);

}  // namespace wealthdist::testing
