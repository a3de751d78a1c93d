#pragma once

#include "wealthdist/distributions.hpp"
#include "wealthdist/harmonic.hpp"
#include "wealthdist/market.hpp"
#include "wealthdist/numerics/quadrature.hpp"

#include <functional>

namespace wealthdist {

/// Relative band within which x0 must match the budget integral.
inline constexpr double kBudgetTolerance = 1e-6;

/// E[Q((Y - A)/sqrt(A))] for Y ~ N(0, A): the initial wealth a target of law F at
/// cumulative variance A requires. Throws IntegralDivergence.
double budget_integral(const TargetDistribution& dist, double A,
                       const numerics::QuadratureSpec& spec = {});

/// budget_integral at A = A_T.
double budget_constraint_terminal(const TargetDistribution& dist, const MarketCurves& curves,
                                  double T, const numerics::QuadratureSpec& spec = {});

/// Parameter b of a lognormal or transformed-normal target whose budget equals x0.
/// Throws InfeasibleWealth (lognormal, x0 < e^{-A_T/2}), NoRoot (transformed
/// normal needs x0 > 3), InvalidParameter (other families).
double solve_family_parameter(Family family, double x0, const MarketCurves& curves, double T);

/// U_T'(x) = exp(-sqrt(A_T) Phi^{-1}(F(x))). Throws BudgetViolated when x0 is off the
/// budget by more than kBudgetTolerance (relative).
std::function<double(double)> marginal_utility_terminal(const TargetDistribution& dist,
                                                        const MarketCurves& curves, double T,
                                                        double x0);

/// g on the A-clock with g(x, A_T) = Q(x / sqrt(A_T)). Closed form for the
/// parametric families, Gaussian convolution otherwise.
HarmonicFunction harmonic_fixed(const TargetDistribution& dist, const MarketCurves& curves, double T,
                                const numerics::QuadratureSpec& spec = {});

/// Always the convolution backing, whatever the family.
HarmonicFunction harmonic_fixed_convolution(const TargetDistribution& dist, double A_T,
                                            const numerics::QuadratureSpec& spec = {});

/// Budget by the Gaussian form and by the quantile coupling
/// int_0^1 F_Z^{-1}(y) F^{-1}(1 - y) dy with Z_T lognormal. Returns {gaussian, coupling}.
std::pair<double, double> cost_efficiency_check(const TargetDistribution& dist,
                                                const MarketCurves& curves, double T);

struct FixedHorizonSolution {
    TargetDistribution dist;
    double x0 = 0.0;
    double T = 0.0;
    double A_T = 0.0;
    double budget = 0.0;
    bool feasible = false;
    HarmonicFunction h;
    std::function<double(double)> marginal_utility;

    /// h(x, t) in calendar time.
    [[nodiscard]] double h_calendar(const MarketCurves& curves, double x, double t) const {
        return h.value(x, curves.A(t));
    }
};

/// Budget check, marginal utility and h in one call.
FixedHorizonSolution solve_fixed_horizon(const TargetDistribution& dist, const MarketCurves& curves,
                                         double T, double x0,
                                         const numerics::QuadratureSpec& spec = {});

/// A(T) after checking 0 < T <= horizon and A(T) > 0.
double horizon_variance(const MarketCurves& curves, double T);

}  // namespace wealthdist
