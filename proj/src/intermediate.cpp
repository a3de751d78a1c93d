#include "wealthdist/intermediate.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/fixed_horizon.hpp"
#include "wealthdist/numerics/normal.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace wealthdist {
namespace {

using cplx = std::complex<double>;

void check_intermediate_time(const MarketCurves& curves, double T_hat) {
    if (!(T_hat > 0.0 && T_hat < curves.horizon())) {
        std::ostringstream os;
        os << "intermediate time " << T_hat << " must lie in (0, " << curves.horizon() << ")";
        fail(ErrorCode::TimeOutOfRange, os.str());
    }
}

}  // namespace

double budget_constraint_intermediate(const TargetDistribution& dist, const MarketCurves& curves,
                                      double T_hat, const numerics::QuadratureSpec& spec) {
    check_intermediate_time(curves, T_hat);
    return budget_integral(dist, horizon_variance(curves, T_hat), spec);
}

double intermediate_c(const MarketCurves& curves, double T_hat) {
    check_intermediate_time(curves, T_hat);
    return std::sqrt(0.5 * (curves.A_T() - curves.A(T_hat)));
}

AssumptionReport verify_assumptions(const AnalyticQuantileExtension& ext) {
    AssumptionReport report;
    std::ostringstream detail;
    report.entire = ext.dist.has_analytic_extension();
    if (!report.entire) {
        report.detail = "G has no closed-form entire extension";
        return report;
    }

    // (ii) max_x |G(x+iy)| / (|y| e^{y^2/4}) must fall toward zero as |y| grows.
    try {
        std::vector<double> ratio;
        for (int k = 1; k <= 20; ++k) {
            const double y = static_cast<double>(k);
            double worst = -std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 24; ++i) {
                const double x = -3.0 + 0.25 * i;
                for (double sgn : {-1.0, 1.0}) {
                    const double mag = std::abs(ext(cplx(x, sgn * y)));
                    worst = std::max(worst, std::log(mag) - std::log(y) - 0.25 * y * y);
                }
            }
            ratio.push_back(worst);
        }
        bool decreasing = true;
        for (std::size_t k = 10; k < ratio.size(); ++k) decreasing &= ratio[k] <= ratio[k - 1] + 1e-12;
        report.growth_ok = decreasing && ratio.back() < std::log(1e-6);
        if (!report.growth_ok) {
            detail << "growth: log ratio at |y|=20 is " << ratio.back() << "; ";
        }
    } catch (const std::exception& e) {
        detail << "growth: " << e.what() << "; ";
    }

    // (iii) g(x,t) = E[G(x + i sqrt(2t) Z)] real and nonnegative on the probe grid.
    try {
        report.real_nonneg_ok = true;
        for (double t : {0.25, 0.5, 0.75, 0.99}) {
            for (int i = 0; i <= 24 && report.real_nonneg_ok; ++i) {
                const double x = -3.0 + 0.25 * i;
                const cplx g = numerics::gaussian_integrate_complex(
                    [&](double y) { return ext(cplx(x, y)); }, 0.0, 2.0 * t);
                if (std::abs(g.imag()) >= 1e-8 * std::max(1.0, std::abs(g.real())) ||
                    g.real() < -1e-10) {
                    report.real_nonneg_ok = false;
                    detail << "heat extension: g(" << x << ", " << t << ") = " << g.real() << " + "
                           << g.imag() << "i; ";
                }
            }
        }
    } catch (const std::exception& e) {
        report.real_nonneg_ok = false;
        detail << "heat extension: " << e.what() << "; ";
    }
    report.detail = detail.str();
    return report;
}

InverseMarginal::InverseMarginal(AnalyticQuantileExtension ext, numerics::QuadratureSpec spec)
    : ext_(std::move(ext)), spec_(spec) {}

std::pair<double, double> InverseMarginal::terminal(double y) const {
    const double u = y / ext_.c;
    const cplx v = numerics::gaussian_integrate_complex(
        [&](double w) { return ext_(cplx(u, numerics::kSqrt2 * w)); }, 0.0, 1.0, spec_);
    const cplx d = numerics::gaussian_integrate_complex(
        [&](double w) { return ext_.derivative(cplx(u, numerics::kSqrt2 * w)); }, 0.0, 1.0, spec_);
    if (std::abs(v.imag()) > 1e-8 * std::abs(v.real())) {
        std::ostringstream os;
        os << "imaginary residue " << v.imag() << " at y = " << y;
        fail(ErrorCode::ComplexResidue, os.str());
    }
    if (!(v.real() > 0.0)) fail(ErrorCode::AssumptionViolated, "recovered I_T is not positive");
    return {v.real(), d.real() / ext_.c};
}

double InverseMarginal::operator()(double x) const {
    if (!(x > 0.0)) fail(ErrorCode::InvalidParameter, "I_T is defined for x > 0");
    return terminal(-std::log(x)).first;
}

InverseMarginal weierstrass_invert(const AnalyticQuantileExtension& ext, const MarketCurves& curves,
                                   double T_hat, const numerics::QuadratureSpec& spec) {
    const double c = intermediate_c(curves, T_hat);
    if (std::abs(ext.c - c) > 1e-12 * c) {
        fail(ErrorCode::InvalidParameter, "extension was built for a different c");
    }
    const AssumptionReport report = verify_assumptions(ext);
    if (!report.entire) fail(ErrorCode::AssumptionViolated, "clause (i) entire extension: " + report.detail);
    if (!report.growth_ok) fail(ErrorCode::AssumptionViolated, "clause (ii) growth: " + report.detail);
    if (!report.real_nonneg_ok) {
        fail(ErrorCode::AssumptionViolated, "clause (iii) real nonnegative limit: " + report.detail);
    }
    return InverseMarginal(ext, spec);
}

HarmonicFunction harmonic_intermediate(const InverseMarginal& inverse, const MarketCurves& curves,
                                       double T_hat, const numerics::QuadratureSpec& spec) {
    check_intermediate_time(curves, T_hat);
    const double A_T = curves.A_T();
    const double A_hat = curves.A(T_hat);
    const double sd = std::sqrt(A_T);
    const double centre = -A_hat + 0.5 * A_T;
    const double half_width = 40.0 * sd + 2.0;
    constexpr int kPoints = 4001;
    const double dx = 2.0 * half_width / (kPoints - 1);
    const double x_lo = centre - half_width;
    std::vector<double> log_v(kPoints), slope(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        const auto [v, d] = inverse.terminal(x_lo + dx * i);
        log_v[i] = std::log(v);
        slope[i] = d / v;
    }
    const double lo_val = log_v.front(), lo_slope = slope.front();
    const double hi_val = log_v.back(), hi_slope = slope.back();
    const double x_hi = x_lo + dx * (kPoints - 1);
    auto table = std::make_shared<boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>>>(
        std::move(log_v), std::move(slope), x_lo, dx);
    auto terminal = [table, x_lo, x_hi, lo_val, lo_slope, hi_val, hi_slope](double y)
        -> std::pair<double, double> {
        double L = 0.0;
        double dL = 0.0;
        if (y <= x_lo) {
            L = lo_val + lo_slope * (y - x_lo);
            dL = lo_slope;
        } else if (y >= x_hi) {
            L = hi_val + hi_slope * (y - x_hi);
            dL = hi_slope;
        } else {
            L = (*table)(y);
            dL = table->prime(y);
        }
        const double v = std::exp(L);
        return {v, v * dL};
    };
    return HarmonicFunction::convolution(terminal, A_T, spec);
}

IntermediateSolution solve_intermediate(const TargetDistribution& dist, const MarketCurves& curves,
                                        double T_hat, double x0, const numerics::QuadratureSpec& spec) {
    const double budget = budget_constraint_intermediate(dist, curves, T_hat, spec);
    if (std::abs(budget - x0) > kBudgetTolerance * std::abs(x0)) {
        std::ostringstream os;
        os << "budget integral at T_hat " << budget << " differs from x0 = " << x0;
        fail(ErrorCode::BudgetViolated, os.str());
    }
    const double c = intermediate_c(curves, T_hat);
    const double A_hat = curves.A(T_hat);
    const AnalyticQuantileExtension ext = analytic_extension(dist, c, std::sqrt(A_hat));
    InverseMarginal inv = weierstrass_invert(ext, curves, T_hat, spec);
    HarmonicFunction h = harmonic_intermediate(inv, curves, T_hat, spec);
    return {T_hat, A_hat, curves.A_T(), c, x0, budget, verify_assumptions(ext), std::move(inv),
            std::move(h)};
}

}  // namespace wealthdist
