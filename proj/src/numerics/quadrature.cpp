#include "wealthdist/numerics/quadrature.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace wealthdist::numerics {
namespace {

// Newton iteration on the orthonormal Hermite recurrence, physicists'
// convention, then rescaled to the standard normal weight.
HermiteRule build_rule(int n) {
    constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
    constexpr int kMaxIter = 100;
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < kMaxIter; ++it) {
            double p1 = kPiM4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    // Ascending order.
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = kSqrt2 * x[n - 1 - i];
        rule.weights[i] = w[n - 1 - i] * inv_sqrt_pi;
    }
    return rule;
}

template <class T>
bool finite(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
        return std::isfinite(v);
    } else if constexpr (std::is_same_v<T, std::complex<double>>) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
        return std::isfinite(v.first) && std::isfinite(v.second);
    }
}

template <class T>
T scale(const T& v, double k) {
    if constexpr (std::is_same_v<T, std::pair<double, double>>) {
        return {v.first * k, v.second * k};
    } else {
        return v * k;
    }
}

template <class T>
T add(const T& a, const T& b) {
    if constexpr (std::is_same_v<T, std::pair<double, double>>) {
        return {a.first + b.first, a.second + b.second};
    } else {
        return a + b;
    }
}

template <class T>
double magnitude(const T& v) {
    if constexpr (std::is_same_v<T, std::pair<double, double>>) {
        return std::max(std::abs(v.first), std::abs(v.second));
    } else {
        return std::abs(v);
    }
}

template <class T>
T sample(const std::function<T(double)>& g, double y) {
    T v = g(y);
    if (!finite(v)) {
        fail(ErrorCode::NonFiniteIntegrand, "integrand is not finite at y=" + std::to_string(y));
    }
    return v;
}

template <class T>
T integrate(const std::function<T(double)>& g, double mean, double variance,
            const QuadratureSpec& spec) {
    spec.validate();
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        fail(ErrorCode::InvalidParameter, "variance must be positive");
    }
    const double sd = std::sqrt(variance);
    T total{};
    if (spec.scheme == Scheme::GaussHermite) {
        const HermiteRule& rule = hermite_rule(spec.node_count);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            total = add(total, scale(sample(g, mean + sd * rule.nodes[i]), rule.weights[i]));
        }
        return total;
    }

    // Adaptive trapezoid on z in [-R, R].
    const double radius = spec.truncation_radius;
    auto weighted = [&](double z) { return scale(sample(g, mean + sd * z), normal_pdf(z)); };
    int intervals = static_cast<int>(std::ceil(2.0 * radius / 0.5));
    double h = 2.0 * radius / intervals;
    T sum = scale(add(weighted(-radius), weighted(radius)), 0.5);
    for (int k = 1; k < intervals; ++k) sum = add(sum, weighted(-radius + k * h));
    T estimate = scale(sum, h);
    constexpr int kMaxLevels = 14;
    for (int level = 0; level < kMaxLevels; ++level) {
        T mid{};
        for (int k = 0; k < intervals; ++k) mid = add(mid, weighted(-radius + (k + 0.5) * h));
        sum = add(sum, mid);
        intervals *= 2;
        h *= 0.5;
        const T next = scale(sum, h);
        const double change = magnitude(add(next, scale(estimate, -1.0)));
        estimate = next;
        if (change <= 1e-13 * magnitude(next) || change < 1e-300) break;
    }
    return estimate;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (node_count < 16) fail(ErrorCode::InvalidParameter, "node_count must be at least 16");
    if (scheme == Scheme::AdaptiveTrapezoid && !(truncation_radius >= 8.0)) {
        fail(ErrorCode::InvalidParameter, "truncation_radius must be at least 8");
    }
}

const HermiteRule& hermite_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<HermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<HermiteRule>(build_rule(n));
    return *slot;
}

double gaussian_integrate(const std::function<double(double)>& g, double mean, double variance,
                          const QuadratureSpec& spec) {
    return integrate<double>(g, mean, variance, spec);
}

std::complex<double> gaussian_integrate_complex(const std::function<std::complex<double>(double)>& g,
                                        double mean, double variance, const QuadratureSpec& spec) {
    return integrate<std::complex<double>>(g, mean, variance, spec);
}

std::pair<double, double> gaussian_integrate_pair(
    const std::function<std::pair<double, double>(double)>& g, double mean, double variance,
    const QuadratureSpec& spec) {
    return integrate<std::pair<double, double>>(g, mean, variance, spec);
}

}  // namespace wealthdist::numerics
