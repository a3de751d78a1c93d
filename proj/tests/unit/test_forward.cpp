#include "fixtures.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/fixed_horizon.hpp"
#include "wealthdist/forward.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace wealthdist;
using cplx = std::complex<double>;

namespace {

constexpr double kA = 0.04;

/// Transformed-normal parameter for budget x0 at variance A, by bisection on
/// the closed-form budget (increasing in b beyond b = A).
double transformed_parameter(double x0, double A) {
    double lo = A;
    double hi = 50.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (testing::transformed_budget(mid, A) < x0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const ForwardSolution& lognormal_solution() {
    static const ForwardSolution sol =
        solve_forward(lognormal_family(0.16), testing::flat_market(0.2), 1.0, 1.0);
    return sol;
}

}  // namespace

TEST_CASE("Fourier transform of the lognormal measure") {
    const auto& sol = lognormal_solution();
    CHECK(sol.convention == FourierConvention::Canonical);
    REQUIRE(sol.grid.size() == 1025);
    CHECK(sol.grid.front() == -40.0);
    CHECK(sol.grid.back() == 40.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        worst = std::max(worst, std::abs(sol.phi[i] - 2.0 * std::exp(cplx(0.0, 2.0 * sol.grid[i]))));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("characteristic-function bounds hold on the grid") {
    const auto& sol = lognormal_solution();
    const std::size_t mid = sol.grid.size() / 2;
    CHECK(sol.grid[mid] == 0.0);
    const double phi0 = sol.phi[mid].real();
    CHECK(phi0 == doctest::Approx(sol.canonical.total_mass).epsilon(1e-9));
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const std::size_t j = sol.grid.size() - 1 - i;
        CHECK(std::abs(sol.phi[j] - std::conj(sol.phi[i])) < 1e-12);
        CHECK(std::abs(sol.phi[i]) <= phi0 * (1.0 + 1e-12));
    }
}

TEST_CASE("single-atom recovery and the induced preferences") {
    const auto& sol = lognormal_solution();
    REQUIRE(sol.canonical.form == RecoveredMeasure::Form::Atomic);
    REQUIRE(sol.canonical.atoms.size() == 1);
    CHECK(std::abs(sol.canonical.atoms[0].location - 2.0) < 1e-6);
    CHECK(std::abs(sol.canonical.atoms[0].mass - 2.0) < 1e-6);
    CHECK(sol.canonical.inverse_moment() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.canonical.admissible);
    for (double x : testing::linspace(0.05, 6.0, 60)) {
        CHECK(sol.initial_datum(x) == doctest::Approx(1.0 / std::sqrt(x)).epsilon(1e-8));
        for (double s : {0.0, 0.01, 0.04}) {
            const double expected = std::sqrt(2.0) * std::sqrt(x) * std::exp(-s / 2.0);
            CHECK(sol.performance(x, s) == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("two-atom recovery for the transformed-normal target") {
    const double x0 = 5.0;
    const double b = transformed_parameter(x0, kA);
    const double beta = std::sqrt(b / kA);
    const auto sol = solve_forward(transformed_normal_family(b), testing::flat_market(0.2), 1.0, x0);
    REQUIRE(sol.canonical.atoms.size() == 2);
    auto atoms = sol.canonical.atoms;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& c) { return a.location < c.location; });
    const double m_beta = 2.0 * beta * std::exp(beta * beta * kA / 2.0 - beta * kA) / x0;
    const double m_2beta = 2.0 * beta * std::exp(2.0 * beta * beta * kA - 2.0 * beta * kA) / x0;
    CHECK(std::abs(atoms[0].location - beta) < 1e-6);
    CHECK(std::abs(atoms[1].location - 2.0 * beta) < 1e-6);
    CHECK(std::abs(atoms[0].mass - m_beta) < 1e-6);
    CHECK(std::abs(atoms[1].mass - m_2beta) < 1e-6);
    CHECK(sol.h.value(-kA, 0.0) == doctest::Approx(x0).epsilon(1e-9));
}

TEST_CASE("h from the recovered measure reproduces the terminal data") {
    const auto& sol = lognormal_solution();
    const auto d = lognormal_family(0.16);
    for (double x : testing::linspace(-3.0 * 0.2, 3.0 * 0.2, 41)) {
        CHECK(sol.h.value(x, kA) == doctest::Approx(d.score_quantile(x / 0.2)).epsilon(1e-5));
    }
}

TEST_CASE("forward and fixed-horizon policies coincide for the lognormal target") {
    const auto& fwd = lognormal_solution();
    const auto fixed = solve_fixed_horizon(lognormal_family(0.16), testing::flat_market(0.2), 1.0, 1.0);
    const double bf = fwd.h.inverse(1.0, 0.0);
    const double bx = fixed.h.inverse(1.0, 0.0);
    for (double a : {0.0, 0.02, 0.04}) {
        for (double w : {-0.4, 0.0, 0.3}) {
            CHECK(fwd.h.value(bf + a + w, a) == doctest::Approx(fixed.h.value(bx + a + w, a)).epsilon(1e-8));
        }
    }
}

TEST_CASE("performance surface is concave, time-decreasing and solves its PDE") {
    const double b = transformed_parameter(5.0, kA);
    const auto sol = solve_forward(transformed_normal_family(b), testing::flat_market(0.2), 1.0, 5.0);
    const auto& u = sol.performance;
    const double dx = 1e-3;
    const double ds = 1e-4;
    for (double x : testing::linspace(0.5, 8.0, 16)) {
        for (double s : {0.01, 0.02, 0.03}) {
            const double v = u(x, s);
            const double ux = (u(x + dx, s) - u(x - dx, s)) / (2.0 * dx);
            const double uxx = (u(x + dx, s) - 2.0 * v + u(x - dx, s)) / (dx * dx);
            const double ut = (u(x, s + ds) - u(x, s - ds)) / (2.0 * ds);
            CHECK(uxx < 0.0);
            CHECK(ut <= 0.0);
            CHECK(std::abs(ut - 0.5 * ux * ux / uxx) <= 1e-4 * std::abs(ut));
        }
    }
}

TEST_CASE("atomic recovery from synthetic samples") {
    const auto grid = fourier_grid();
    std::vector<cplx> phi;
    for (double x : grid) phi.push_back(0.7 * std::exp(cplx(0.0, 0.9 * x)) + 0.3 * std::exp(cplx(0.0, 3.1 * x)));
    const auto m = recover_measure(grid, phi);
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.fit_residual < 1e-6);
    CHECK(m.total_mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(check_admissibility(m));
}

TEST_CASE("the whole-line example has a Gaussian transform and is refused") {
    const auto m1 = testing::flat_market(1.0);
    const auto d = whole_line_example(m1.A(1.0));
    CHECK(fourier_convention(d, m1, 1.0) == FourierConvention::Literal);
    for (double x : testing::linspace(-5.0, 5.0, 41)) {
        CHECK(std::abs(fourier_of_measure(d, m1, 1.0, x) - std::exp(-x * x / 2.0)) < 1e-6);
    }

    try {
        (void)solve_forward(d, m1, 1.0, 1.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Inadmissible);
        CHECK(std::string(e.what()).find("local forward investment performance process") != std::string::npos);
    }
}

TEST_CASE("Gaussian measure: support violation and the exponential-moment probe") {
    const auto grid = fourier_grid();
    std::vector<cplx> phi;
    for (double x : grid) phi.emplace_back(std::exp(-x * x / 2.0), 0.0);
    try {
        (void)recover_measure(grid, phi);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SupportViolation);
    }
    RecoveryOptions lax;
    lax.enforce_support = false;
    const auto m = recover_measure(grid, phi, lax);
    CHECK(m.form == RecoveredMeasure::Form::Density);
    CHECK(m.nonpositive_mass == doctest::Approx(0.5).epsilon(0.05));
    CHECK_FALSE(m.admissible);
    // e^{y^2 t / 2} against e^{-y^2 / 2}: finite below t = 1 only.
    CHECK(check_admissibility(m, 0.5));
    CHECK_FALSE(check_admissibility(m, 2.0));
}
