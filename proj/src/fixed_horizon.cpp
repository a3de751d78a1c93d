#include "wealthdist/fixed_horizon.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"
#include "wealthdist/numerics/roots.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace wealthdist {

double horizon_variance(const MarketCurves& curves, double T) {
    if (!(T > 0.0)) fail(ErrorCode::TimeOutOfRange, "target time must be positive");
    const double A = curves.A(T);
    if (!(A > 0.0)) fail(ErrorCode::InvalidParameter, "A_T must be positive");
    return A;
}

double budget_integral(const TargetDistribution& dist, double A, const numerics::QuadratureSpec& spec) {
    const GrowthClass& g = dist.growth();
    if (g.kind == GrowthClass::Kind::Subgaussian && !(g.a < 0.5)) {
        fail(ErrorCode::IntegralDivergence, "quantile grows too fast for the Gaussian kernel");
    }
    const double sd = std::sqrt(A);
    double value = 0.0;
    try {
        value = numerics::gaussian_integrate(
            [&](double y) { return dist.score_quantile((y - A) / sd); }, 0.0, A, spec);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteIntegrand) fail(ErrorCode::IntegralDivergence, e.what());
        throw;
    }
    if (!std::isfinite(value)) fail(ErrorCode::IntegralDivergence, "budget integral is not finite");
    return value;
}

double budget_constraint_terminal(const TargetDistribution& dist, const MarketCurves& curves,
                                  double T, const numerics::QuadratureSpec& spec) {
    return budget_integral(dist, horizon_variance(curves, T), spec);
}

double solve_family_parameter(Family family, double x0, const MarketCurves& curves, double T) {
    if (!(x0 > 0.0)) fail(ErrorCode::InvalidParameter, "x0 must be positive");
    const double A = horizon_variance(curves, T);
    std::function<TargetDistribution(double)> make;
    if (family == Family::Lognormal) {
        make = lognormal_family;
    } else if (family == Family::TransformedNormal) {
        if (!(x0 > 3.0)) {
            fail(ErrorCode::NoRoot, "transformed-normal targets need x0 > 3");
        }
        make = transformed_normal_family;
    } else {
        fail(ErrorCode::InvalidParameter, "only parametric families have a solvable parameter");
    }
    auto residual = [&](double b) { return budget_integral(make(b), A) - x0; };

    // On b >= A both budgets increase in b; the lognormal budget is minimal at b = A,
    // where x0 = e^{-A/2} is a double root.
    const double f_lo = residual(A);
    if (std::abs(f_lo) <= 1e-14 * x0) return A;
    if (f_lo > 0.0) {
        if (family == Family::Lognormal) {
            std::ostringstream os;
            os << "x0 = " << x0 << " is below e^{-A_T/2} = " << std::exp(-0.5 * A)
               << "; A_T + 2 log x0 must be nonnegative";
            fail(ErrorCode::InfeasibleWealth, os.str());
        }
        fail(ErrorCode::NoRoot, "no transformed-normal parameter b > A_T matches x0");
    }
    double hi = std::max(4.0 * A, A + 1.0);
    for (int i = 0; residual(hi) < 0.0; ++i) {
        if (i > 60) fail(ErrorCode::NoRoot, "could not bracket the family parameter");
        hi *= 2.0;
    }
    return numerics::bracketed_root(residual, A, hi, 1e-14);
}

std::function<double(double)> marginal_utility_terminal(const TargetDistribution& dist,
                                                        const MarketCurves& curves, double T,
                                                        double x0) {
    const double A = horizon_variance(curves, T);
    const double budget = budget_integral(dist, A);
    if (std::abs(budget - x0) > kBudgetTolerance * std::abs(x0)) {
        std::ostringstream os;
        os << "budget integral " << budget << " differs from x0 = " << x0;
        fail(ErrorCode::BudgetViolated, os.str());
    }
    const double root_a = std::sqrt(A);
    return [dist, root_a](double x) { return std::exp(-root_a * dist.score(x)); };
}

HarmonicFunction harmonic_fixed_convolution(const TargetDistribution& dist, double A_T,
                                            const numerics::QuadratureSpec& spec) {
    const double sd = std::sqrt(A_T);
    auto terminal = [dist, sd](double y) -> std::pair<double, double> {
        const double z = y / sd;
        return {dist.score_quantile(z), dist.score_quantile_derivative(z) / sd};
    };
    return HarmonicFunction::convolution(terminal, A_T, spec);
}

HarmonicFunction harmonic_fixed(const TargetDistribution& dist, const MarketCurves& curves, double T,
                                const numerics::QuadratureSpec& spec) {
    const double A = horizon_variance(curves, T);
    if (dist.support_lower() > -std::numeric_limits<double>::infinity() && !dist.exp_terms().empty()) {
        // w e^{r y / sqrt(A)} at s = A  ->  w e^{r^2/2} e^{(r/sqrt(A)) x - (r^2/2A) s}
        std::vector<HarmonicFunction::Term> terms;
        for (const auto& t : dist.exp_terms()) {
            terms.push_back({t.weight * std::exp(0.5 * t.rate * t.rate), t.rate / std::sqrt(A)});
        }
        return HarmonicFunction::exp_sum(std::move(terms));
    }
    return harmonic_fixed_convolution(dist, A, spec);
}

std::pair<double, double> cost_efficiency_check(const TargetDistribution& dist,
                                                const MarketCurves& curves, double T) {
    const double A = horizon_variance(curves, T);
    const double gaussian = budget_integral(dist, A);
    const double root_a = std::sqrt(A);
    // F_Z^{-1}(y) = exp(-A/2 + sqrt(A) Phi^{-1}(y)),  F^{-1}(1-y) = Q(-Phi^{-1}(y)).
    auto integrand = [&](double y, double yc) {
        const double z = (y < 0.5) ? numerics::normal_quantile(y)
                                   : -numerics::normal_quantile(std::abs(yc));
        if (!std::isfinite(z)) return 0.0;
        return std::exp(-0.5 * A + root_a * z) * dist.score_quantile(-z);
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double coupling = integrator.integrate(integrand, 0.0, 1.0);
    if (!std::isfinite(coupling)) fail(ErrorCode::IntegralDivergence, "coupling integral diverged");
    return {gaussian, coupling};
}

FixedHorizonSolution solve_fixed_horizon(const TargetDistribution& dist, const MarketCurves& curves,
                                         double T, double x0, const numerics::QuadratureSpec& spec) {
    FixedHorizonSolution sol{dist, x0, T, horizon_variance(curves, T), 0.0, false,
                             harmonic_fixed(dist, curves, T, spec), {}};
    sol.budget = budget_integral(dist, sol.A_T, spec);
    sol.feasible = std::abs(sol.budget - x0) <= kBudgetTolerance * std::abs(x0);
    sol.marginal_utility = marginal_utility_terminal(dist, curves, T, x0);
    return sol;
}

}  // namespace wealthdist
