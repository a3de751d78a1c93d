#include "fixtures.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/market.hpp"

#include <doctest.h>

#include <random>

using namespace wealthdist;

namespace {

MarketSpec two_piece() {
    MarketSpec spec;
    spec.d = 1;
    spec.horizon = 1.0;
    MarketPiece a{0.0, 0.5, 0.0, Eigen::VectorXd::Constant(1, 0.2), Eigen::MatrixXd::Identity(1, 1)};
    MarketPiece b{0.5, 1.0, 0.0, Eigen::VectorXd::Constant(1, 0.4), Eigen::MatrixXd::Identity(1, 1)};
    spec.pieces = {a, b};
    return spec;
}

}  // namespace

TEST_CASE("cumulative variance of constant and piecewise markets") {
    const auto flat = testing::flat_market(0.2);
    CHECK(flat.A(0.0) == 0.0);
    CHECK(flat.A(1.0) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(flat.A(0.25) == doctest::Approx(0.01).epsilon(1e-15));

    const MarketCurves pw(two_piece());
    CHECK(pw.A(1.0) == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(pw.A(0.5) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(pw.lambda(0.75)(0) == doctest::Approx(0.4));
    CHECK(pw.time_of(0.06) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(cumulative_variance(build_curves(two_piece()), 1.0) == pw.A(1.0));
}

TEST_CASE("market price of risk in several dimensions") {
    Eigen::MatrixXd vol(2, 2);
    vol << 0.2, 0.0, 0.1, 0.3;
    Eigen::VectorXd drift(2);
    drift << 0.07, 0.09;
    const auto curves = MarketCurves(MarketSpec::constant(0.01, drift, vol, 2.0));
    // sigma^T is upper triangular: back-substitute by hand.
    Eigen::VectorXd lambda(2);
    lambda(1) = 0.08 / 0.3;
    lambda(0) = (0.06 - 0.1 * lambda(1)) / 0.2;
    CHECK((curves.lambda(1.0) - lambda).norm() < 1e-14);
    CHECK(curves.A(2.0) == doctest::Approx(2.0 * lambda.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("A is nondecreasing with slope at least c0 squared") {
    const MarketCurves pw(two_piece());
    const double c0 = pw.spec().lambda_min;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double t1 = u(gen);
        double t2 = u(gen);
        if (t1 > t2) std::swap(t1, t2);
        CHECK(pw.A(t2) - pw.A(t1) >= c0 * c0 * (t2 - t1) - 1e-16);
    }
}

TEST_CASE("invalid markets are rejected with the right code") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::SchemaViolation;
    };
    CHECK(code_of([] { MarketCurves(MarketSpec::black_scholes(0.0, 0.2, 0.0, 1.0)); }) ==
          ErrorCode::SingularVolatility);
    CHECK(code_of([] { MarketCurves(MarketSpec::black_scholes(0.05, 0.05, 0.2, 1.0)); }) ==
          ErrorCode::RiskPriceOutOfBounds);
    CHECK(code_of([] { (void)testing::flat_market().A(1.5); }) == ErrorCode::TimeOutOfRange);
    auto gap = two_piece();
    gap.pieces[1].t_start = 0.6;
    CHECK(code_of([&] { MarketCurves{gap}; }) == ErrorCode::InvalidParameter);
}
