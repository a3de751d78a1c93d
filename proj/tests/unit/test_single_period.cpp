#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"
#include "wealthdist/single_period.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace wealthdist;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::SchemaViolation;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("state grid is the lognormal midpoint quantiles") {
    const auto s = discretize_lognormal(0.05, 0.2, 4);
    REQUIRE(s.size() == 4);
    for (int i = 0; i < 4; ++i) {
        const double p = (2.0 * i + 1.0) / 8.0;
        CHECK(s[static_cast<std::size_t>(i)] ==
              doctest::Approx(std::exp(0.05 + 0.2 * numerics::normal_quantile(p))).epsilon(1e-14));
    }
}

TEST_CASE("pricing identities on 50 random markets") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ur(0.0, 0.05);
    std::uniform_real_distribution<double> uprem(0.01, 0.1);
    std::uniform_real_distribution<double> us(0.1, 0.4);
    std::uniform_int_distribution<int> un(10, 200);
    for (int k = 0; k < 50; ++k) {
        const double r = ur(gen);
        const double mu = r + uprem(gen);
        const auto m = make_single_period_market(un(gen), mu, us(gen), r);
        CAPTURE(k);
        CHECK(m.pricing.b < 0.0);
        CHECK(m.stock_states.front() < 1.0 + r);
        CHECK(m.stock_states.back() > 1.0 + r);
        CHECK(std::abs(mean(m.state_prices) - 1.0 / (1.0 + r)) < 1e-10);
        std::vector<double> xs(m.state_prices.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = m.state_prices[i] * m.stock_states[i];
        CHECK(std::abs(mean(xs) - 1.0) < 1e-10);
        CHECK(std::is_sorted(m.state_prices.rbegin(), m.state_prices.rend()));
        // Uniqueness: the defining equation changes sign once around b.
        auto f = [&](double b) {
            double lhs = 0.0;
            double rhs = 0.0;
            for (double s : m.stock_states) {
                lhs += (1.0 + r) * std::pow(s, b);
                rhs += std::pow(s, b + 1.0);
            }
            return rhs - lhs;
        };
        CHECK(f(m.pricing.b - 0.05) * f(m.pricing.b + 0.05) < 0.0);
    }
}

TEST_CASE("no-arbitrage violations are refused") {
    const std::vector<double> states{1.1, 1.2, 1.3};
    CHECK(code_of([&] { (void)solve_pricing_exponent(states, 0.5); }) == ErrorCode::NoArbitrageViolated);
    CHECK(is_refusal(ErrorCode::NoArbitrageViolated));
}

TEST_CASE("distributional price equals the exhaustive permutation minimum") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int N = 3; N <= 7; ++N) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto m = make_single_period_market(N, 0.06, 0.25, 0.01);
            std::vector<double> levels(static_cast<std::size_t>(N));
            for (auto& x : levels) x = u(gen);
            std::vector<double> perm = levels;
            std::sort(perm.begin(), perm.end());
            double best = std::numeric_limits<double>::infinity();
            do {
                double c = 0.0;
                for (int i = 0; i < N; ++i) c += m.state_prices[static_cast<std::size_t>(i)] * perm[static_cast<std::size_t>(i)];
                best = std::min(best, c / N);
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(distributional_price(levels, m.state_prices) == doctest::Approx(best).epsilon(1e-14));
        }
    }
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    CHECK(code_of([&] { (void)distributional_price(one, two); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("constant wealth costs its discounted value exactly") {
    const auto m = make_single_period_market(100, 0.08, 0.2, 0.02);
    BuilderSession s(m, 1.0);
    const double cost = s.place_markers(std::vector<double>(100, 1.02));
    CHECK(cost == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.status() == SessionStatus::Submittable);
}

TEST_CASE("session life cycle") {
    const auto m = make_single_period_market(50, 0.08, 0.2, 0.02);
    BuilderSession s(m, 1.0);
    CHECK(s.status() == SessionStatus::Editing);
    CHECK(code_of([&] { (void)s.realize(1); }) == ErrorCode::NotSubmitted);

    // 95% of the budget is outside the band.
    s.place_markers(std::vector<double>(50, 0.95 * 1.02));
    CHECK(s.status() == SessionStatus::Editing);
    CHECK(code_of([&] { (void)s.submit(); }) == ErrorCode::IllegalTransition);

    std::vector<double> levels(50);
    for (int i = 0; i < 50; ++i) levels[static_cast<std::size_t>(i)] = 0.6 + 0.016 * (49 - i);
    const double raw = distributional_price(levels, m.state_prices);
    for (auto& x : levels) x /= raw;  // exactly on budget
    s.place_markers(levels);
    CHECK(std::is_sorted(s.markers().begin(), s.markers().end()));
    CHECK(s.cost() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.status() == SessionStatus::Submittable);

    const auto inference = s.submit();
    CHECK(s.status() == SessionStatus::Submitted);
    REQUIRE(inference.points.size() == 50);
    for (std::size_t i = 1; i < inference.points.size(); ++i) {
        CHECK(inference.points[i].wealth >= inference.points[i - 1].wealth);
        CHECK(inference.points[i].marginal_utility <= inference.points[i - 1].marginal_utility);
    }
    CHECK_FALSE(inference.degenerate);
    CHECK(code_of([&] { s.place_markers(levels); }) == ErrorCode::IllegalTransition);

    const auto r = s.realize(9);
    CHECK(s.status() == SessionStatus::Realized);
    CHECK(r.state == draw_state(9, 50));
    CHECK(r.wealth == s.markers()[static_cast<std::size_t>(r.state)]);
    CHECK(code_of([&] { (void)s.realize(9); }) == ErrorCode::IllegalTransition);
}

TEST_CASE("ties are flagged as degenerate and constant markers realize the constant") {
    const auto m = make_single_period_market(20, 0.08, 0.2, 0.02);
    BuilderSession s(m, 1.0);
    s.place_markers(std::vector<double>(20, 1.02));
    const auto inf = s.submit();
    CHECK(inf.degenerate);
    CHECK(s.realize(4).wealth == 1.02);
}

TEST_CASE("realized states are uniform") {
    const int N = 10;
    const int n = 100000;
    std::vector<int> count(N, 0);
    for (int k = 0; k < n; ++k) ++count[static_cast<std::size_t>(draw_state(static_cast<std::uint64_t>(k), N))];
    const double p = 1.0 / N;
    for (int c : count) CHECK(std::abs(static_cast<double>(c) / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("invalid inputs") {
    CHECK(code_of([] { (void)discretize_lognormal(0.0, -0.1, 10); }) == ErrorCode::InvalidParameter);
    const auto m = make_single_period_market(10, 0.08, 0.2, 0.02);
    BuilderSession s(m, 1.0);
    CHECK(code_of([&] { s.place_markers({1.0, 2.0}); }) == ErrorCode::DimensionMismatch);
    std::vector<double> bad(10, 1.0);
    bad[3] = -1.0;
    CHECK(code_of([&] { s.place_markers(bad); }) == ErrorCode::InvalidParameter);
}
