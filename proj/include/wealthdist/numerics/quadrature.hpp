#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace wealthdist::numerics {

enum class Scheme { GaussHermite, AdaptiveTrapezoid };

/// How Gaussian-weighted integrals are evaluated.
struct QuadratureSpec {
    int node_count = 96;
    double truncation_radius = 10.0;  ///< standard deviations, adaptive scheme only
    Scheme scheme = Scheme::GaussHermite;

    /// Throws InvalidParameter when node_count < 16 or an adaptive radius < 8.
    void validate() const;
};

/// Nodes and weights with sum_i w_i g(z_i) ~ E[g(Z)], Z standard normal.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Probabilists' Gauss-Hermite rule with n nodes. Cached; safe to call concurrently.
const HermiteRule& hermite_rule(int n);

/// E[g(Y)] for Y ~ N(mean, variance).
///
/// Gauss-Hermite is exact for polynomials of degree < 2n - 1. The adaptive
/// trapezoid integrates over mean +- radius*sd and halves its step until the
/// relative change drops below 1e-13. Throws NonFiniteIntegrand on any
/// non-finite sample.
double gaussian_integrate(const std::function<double(double)>& g, double mean, double variance,
                          const QuadratureSpec& spec = {});

/// Complex integrands, integrated component-wise.
std::complex<double> gaussian_integrate_complex(const std::function<std::complex<double>(double)>& g,
                                        double mean, double variance,
                                        const QuadratureSpec& spec = {});

/// Both E[g(Y)] and E[g'(Y)] in one pass; g returns {value, derivative}.
std::pair<double, double> gaussian_integrate_pair(
    const std::function<std::pair<double, double>(double)>& g, double mean, double variance,
    const QuadratureSpec& spec = {});

}  // namespace wealthdist::numerics
