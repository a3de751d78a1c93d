#pragma once

#include "wealthdist/distributions.hpp"
#include "wealthdist/harmonic.hpp"
#include "wealthdist/market.hpp"
#include "wealthdist/numerics/quadrature.hpp"

#include <string>

namespace wealthdist {

/// Outcome of the three checks on G: entire extension, growth
/// |G(x+iy)| = o(|y| e^{y^2/4}), and a real nonnegative heat extension.
struct AssumptionReport {
    bool entire = false;
    bool growth_ok = false;
    bool real_nonneg_ok = false;
    std::string detail;

    [[nodiscard]] bool all() const noexcept { return entire && growth_ok && real_nonneg_ok; }
};

/// Budget at the intermediate time: budget_integral with variance A_{T_hat}.
/// Throws TimeOutOfRange unless 0 < T_hat < T.
double budget_constraint_intermediate(const TargetDistribution& dist, const MarketCurves& curves,
                                      double T_hat, const numerics::QuadratureSpec& spec = {});

/// c = sqrt((A_T - A_{T_hat}) / 2).
double intermediate_c(const MarketCurves& curves, double T_hat);

/// Never throws; failed clauses are reported.
AssumptionReport verify_assumptions(const AnalyticQuantileExtension& ext);

/// Inverse marginal utility recovered by Weierstrass inversion,
/// I_T(e^{-y}) = E[G(y/c + i sqrt(2) W)], W standard normal.
class InverseMarginal {
public:
    InverseMarginal(AnalyticQuantileExtension ext, numerics::QuadratureSpec spec);

    /// I_T(x) for x > 0.
    [[nodiscard]] double operator()(double x) const;
    /// I_T(e^{-y}) and its derivative in y.
    [[nodiscard]] std::pair<double, double> terminal(double y) const;

    [[nodiscard]] const AnalyticQuantileExtension& extension() const noexcept { return ext_; }

private:
    AnalyticQuantileExtension ext_;
    numerics::QuadratureSpec spec_;
};

/// Throws AssumptionViolated (naming the failed clause), ComplexResidue.
InverseMarginal weierstrass_invert(const AnalyticQuantileExtension& ext, const MarketCurves& curves,
                                   double T_hat, const numerics::QuadratureSpec& spec = {});

/// g on the A-clock with terminal data I_T(e^{-y}) at A_T. log I_T(e^{-y}) is
/// tabulated with cubic Hermite pieces (exact for single exponentials) and
/// continued linearly, then convolved.
HarmonicFunction harmonic_intermediate(const InverseMarginal& inverse, const MarketCurves& curves,
                                       double T_hat, const numerics::QuadratureSpec& spec = {});

struct IntermediateSolution {
    double T_hat = 0.0;
    double A_hat = 0.0;
    double A_T = 0.0;
    double c = 0.0;
    double x0 = 0.0;
    double budget = 0.0;
    AssumptionReport report;
    InverseMarginal inverse_marginal;
    HarmonicFunction h;
};

/// Budget check at T_hat, inversion and h. Throws BudgetViolated, AssumptionViolated,
/// NoAnalyticExtension.
IntermediateSolution solve_intermediate(const TargetDistribution& dist, const MarketCurves& curves,
                                        double T_hat, double x0,
                                        const numerics::QuadratureSpec& spec = {});

}  // namespace wealthdist
