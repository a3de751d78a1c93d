#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"
#include "wealthdist/numerics/quadrature.hpp"
#include "wealthdist/numerics/roots.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>

using namespace wealthdist;
using namespace wealthdist::numerics;

TEST_CASE("normal distribution functions agree with Boost.Math") {
    const boost::math::normal_distribution<double> nd;
    for (double x : {-37.0, -8.0, -1.5, 0.0, 0.3, 2.0, 8.0}) {
        CHECK(normal_pdf(x) == doctest::Approx(boost::math::pdf(nd, x)).epsilon(1e-14));
        const double c = boost::math::cdf(nd, x);
        if (c > 0.0) CHECK(normal_cdf(x) == doctest::Approx(c).epsilon(1e-13));
    }
    for (double p : {1e-300, 1e-12, 0.01, 0.5, 0.975, 1.0 - 1e-12}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(std::isinf(normal_quantile(0.0)));
    CHECK(std::isinf(normal_quantile(1.0)));
}

TEST_CASE("Gauss-Hermite integrates Gaussian moments and the lognormal mean") {
    const auto& rule = hermite_rule(32);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(gaussian_integrate([](double y) { return y * y; }, 0.5, 2.0) ==
          doctest::Approx(2.25).epsilon(1e-13));
    CHECK(gaussian_integrate([](double y) { return std::pow(y, 4); }, 0.0, 1.0) ==
          doctest::Approx(3.0).epsilon(1e-13));
    for (double v : {0.04, 0.36, 1.0}) {
        CHECK(gaussian_integrate([](double y) { return std::exp(y); }, -0.3, v) ==
              doctest::Approx(std::exp(-0.3 + v / 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("adaptive trapezoid agrees with Gauss-Hermite") {
    QuadratureSpec adaptive;
    adaptive.scheme = Scheme::AdaptiveTrapezoid;
    auto g = [](double y) { return std::exp(-0.5 * y) + std::cos(y); };
    CHECK(gaussian_integrate(g, 0.2, 0.7, adaptive) ==
          doctest::Approx(gaussian_integrate(g, 0.2, 0.7)).epsilon(1e-11));
}

TEST_CASE("complex and paired integration") {
    const auto z = gaussian_integrate_complex(
        [](double y) { return std::exp(std::complex<double>(0.0, 1.5 * y)); }, 0.0, 1.0);
    CHECK(z.real() == doctest::Approx(std::exp(-1.125)).epsilon(1e-13));
    CHECK(std::abs(z.imag()) < 1e-14);
    const auto [a, b] = gaussian_integrate_pair(
        [](double y) { return std::pair{y * y, 2.0 * y}; }, 1.0, 0.5);
    CHECK(a == doctest::Approx(1.5));
    CHECK(b == doctest::Approx(2.0));
}

TEST_CASE("quadrature rejects undersized specs and non-finite integrands") {
    QuadratureSpec bad;
    bad.node_count = 8;
    CHECK_THROWS_AS(bad.validate(), Error);
    try {
        gaussian_integrate([](double) { return std::nan(""); }, 0.0, 1.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteIntegrand);
    }
}

TEST_CASE("root finding and monotone inversion") {
    CHECK(bracketed_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    try {
        bracketed_root([](double x) { return x * x + 1.0; }, -1.0, 1.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSignChange);
    }
    auto f = [](double x) { return std::exp(x); };
    CHECK(monotone_inverse(f, 3.0, 0.0, 2.0) == doctest::Approx(std::log(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(monotone_inverse(f, 100.0, 0.0, 2.0), Error);
    CHECK(monotone_inverse_unbounded(f, 1e-20, 0.0) == doctest::Approx(std::log(1e-20)).epsilon(1e-12));
}

TEST_CASE("refusal classification") {
    CHECK(is_refusal(ErrorCode::InfeasibleWealth));
    CHECK(is_refusal(ErrorCode::Inadmissible));
    CHECK_FALSE(is_refusal(ErrorCode::SchemaViolation));
    CHECK_FALSE(is_refusal(ErrorCode::MaxIterations));
    CHECK(to_string(ErrorCode::NoArbitrageViolated) == "NoArbitrageViolated");
}
