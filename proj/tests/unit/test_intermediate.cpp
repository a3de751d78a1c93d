#include "fixtures.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/fixed_horizon.hpp"
#include "wealthdist/intermediate.hpp"
#include "wealthdist/numerics/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace wealthdist;

namespace {

constexpr double kHat = 0.5;  // A(0.5) = 0.02 in the flat 0.2 market

/// Entire G(z) = e^{-z^2/2}: passes the growth clause but its Weierstrass
/// inverse diverges, so the real-nonnegative clause must fail.
class GaussianBump : public detail::QuantileModel {
public:
    double q(double z) const override { return std::exp(-0.5 * z * z); }
    double dq(double z) const override { return -z * q(z); }
    double score(double) const override { return 0.0; }
    bool analytic() const override { return true; }
    std::complex<double> q(std::complex<double> z) const override { return std::exp(-0.5 * z * z); }
    std::complex<double> dq(std::complex<double> z) const override { return -z * q(z); }
};

}  // namespace

TEST_CASE("intermediate constants for the lognormal example") {
    const auto m = testing::flat_market(0.2);
    CHECK(m.A(kHat) == doctest::Approx(0.02));
    CHECK(intermediate_c(m, kHat) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(budget_constraint_intermediate(lognormal_family(0.08), m, kHat) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)budget_constraint_intermediate(lognormal_family(0.08), m, 1.0), Error);
}

TEST_CASE("Weierstrass inversion of the lognormal example") {
    const auto m = testing::flat_market(0.2);
    const auto sol = solve_intermediate(lognormal_family(0.08), m, kHat, 1.0);
    CHECK(sol.report.all());
    double prev = std::numeric_limits<double>::infinity();
    for (double x : testing::linspace(-2.0, 2.0, 81)) {
        CHECK(sol.inverse_marginal.terminal(x).first == doctest::Approx(std::exp(2.0 * x - 0.04)).epsilon(1e-6));
        const double v = sol.inverse_marginal(std::exp(x));
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("forward Weierstrass transform of the inverse recovers G") {
    const auto m = testing::flat_market(0.2);
    for (const auto& d : {lognormal_family(0.08), transformed_normal_family(0.08)}) {
        const double x0 = budget_constraint_intermediate(d, m, kHat);
        const auto sol = solve_intermediate(d, m, kHat, x0);
        const auto& G = sol.inverse_marginal.extension();
        for (double z : testing::linspace(-3.0, 3.0, 25)) {
            // G(z) = E[I_T(e^{-c(z + sqrt(2) W)})].
            const double back = numerics::gaussian_integrate(
                [&](double y) { return sol.inverse_marginal.terminal(sol.c * y).first; }, z, 2.0);
            CHECK(back == doctest::Approx(G.value(z)).epsilon(1e-6));
        }
    }
}

TEST_CASE("h reproduces the target at the intermediate date and the budget at zero") {
    const auto m = testing::flat_market(0.2);
    const auto d = transformed_normal_family(0.08);
    const double A_hat = m.A(kHat);
    const double x0 = budget_constraint_intermediate(d, m, kHat);
    const auto sol = solve_intermediate(d, m, kHat, x0);
    for (double x : testing::linspace(-0.4, 0.4, 21)) {
        CHECK(sol.h.value(x, A_hat) == doctest::Approx(d.score_quantile(x / std::sqrt(A_hat))).epsilon(1e-6));
    }
    CHECK(sol.h.value(-A_hat, 0.0) == doctest::Approx(x0).epsilon(1e-6));
}

TEST_CASE("intermediate and terminal engines share the lognormal policy") {
    const auto m = testing::flat_market(0.2);
    const auto inter = solve_intermediate(lognormal_family(0.08), m, kHat, 1.0);
    const auto term = solve_fixed_horizon(lognormal_family(0.16), m, 1.0, 1.0);
    // The engines anchor h at different points; X* = h(h^{-1}(x0, 0) + A_t + M_t, A_t) agrees.
    const double base_i = inter.h.inverse(1.0, 0.0);
    const double base_t = term.h.inverse(1.0, 0.0);
    for (double a : {0.0, 0.01, 0.02, 0.03, 0.04}) {
        for (double w : {-0.3, -0.04, 0.2}) {
            CHECK(inter.h.value(base_i + a + w, a) ==
                  doctest::Approx(term.h.value(base_t + a + w, a)).epsilon(1e-8));
        }
    }
}

TEST_CASE("assumption checks on G") {
    const auto ok = verify_assumptions(exp_sum_extension({{1.0, 0.2}}));
    CHECK(ok.all());
    const auto bump = verify_assumptions(custom_extension(std::make_shared<GaussianBump>()));
    CHECK(bump.entire);
    CHECK_FALSE(bump.all());
    auto ext = custom_extension(std::make_shared<GaussianBump>());
    ext.c = 0.1;
    ext.scale = 0.1;
    try {
        (void)weierstrass_invert(ext, testing::flat_market(0.2), kHat);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AssumptionViolated);
    }
}

TEST_CASE("marker targets are refused by the intermediate engine") {
    const auto d = from_markers(testing::lognormal_markers(20, 0.3));
    try {
        (void)solve_intermediate(d, testing::flat_market(0.2), kHat, budget_constraint_intermediate(d, testing::flat_market(0.2), kHat));
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoAnalyticExtension);
    }
}
