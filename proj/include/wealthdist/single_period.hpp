#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wealthdist {

/// N equally likely states: S_i = exp of the Normal(mu, sigma^2) quantile at (2i-1)/2N.
/// Throws InvalidParameter.
std::vector<double> discretize_lognormal(double mu, double sigma, int N);

/// Log-linear state prices log xi = a + b log S.
struct PricingExponent {
    double b = 0.0;
    double a = 0.0;
};

/// b solves (1+r) sum S^b = sum S^{b+1}; a makes mean(xi) = 1/(1+r).
/// Throws NoArbitrageViolated, RootBracketFailure.
PricingExponent solve_pricing_exponent(std::span<const double> states, double r);

/// xi_i = e^a S_i^b.
std::vector<double> state_prices(std::span<const double> states, const PricingExponent& pe);

struct SinglePeriodMarket {
    int N = 0;
    double r = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    std::vector<double> stock_states;  ///< nondecreasing
    PricingExponent pricing;
    std::vector<double> state_prices;  ///< nonincreasing when b < 0
};

SinglePeriodMarket make_single_period_market(int N, double mu, double sigma, double r);

/// Cheapest cost of any payoff with the given equally likely levels:
/// (1/N) sum xi_i x_(i), largest wealth on the cheapest state. Throws DimensionMismatch.
double distributional_price(std::span<const double> levels, std::span<const double> xi);

enum class SessionStatus { Editing, Submittable, Submitted, Realized };

std::string_view to_string(SessionStatus status) noexcept;

/// Lower edge of the submit band, as a fraction of the budget.
inline constexpr double kSubmitBandLow = 0.99;
/// Relative slack at the top of the band so an exactly-on-budget placement is not
/// rejected for summation round-off.
inline constexpr double kCostRoundoff = 1e-12;

struct MarginalPoint {
    double wealth = 0.0;
    double marginal_utility = 0.0;  ///< xi at the paired state, scale k = 1
};

struct MarginalInference {
    std::vector<MarginalPoint> points;  ///< wealth nondecreasing
    bool degenerate = false;            ///< some wealth level maps to several marginal values
};

struct Realization {
    int state = 0;  ///< 0-based index into the sorted states
    double wealth = 0.0;
};

/// One elicitation: markers on equally likely states under a budget.
class BuilderSession {
public:
    BuilderSession(SinglePeriodMarket market, double budget);

    [[nodiscard]] const SinglePeriodMarket& market() const noexcept { return market_; }
    [[nodiscard]] double budget() const noexcept { return budget_; }
    /// Current placement, sorted nondecreasing.
    [[nodiscard]] const std::vector<double>& markers() const noexcept { return markers_; }
    [[nodiscard]] double cost() const noexcept { return cost_; }
    [[nodiscard]] SessionStatus status() const noexcept { return status_; }
    [[nodiscard]] const std::optional<Realization>& realization() const noexcept { return realized_; }

    /// Replaces the placement and returns its cost. Throws IllegalTransition once
    /// submitted, DimensionMismatch, InvalidParameter for negative or non-finite levels.
    double place_markers(std::vector<double> levels);
    /// Recomputes the cost meter and the editing/submittable status.
    double marker_cost();
    /// Throws IllegalTransition unless submittable.
    MarginalInference submit();
    /// Throws NotSubmitted before submit and IllegalTransition after a realization.
    Realization realize(std::uint64_t seed);

private:
    SinglePeriodMarket market_;
    double budget_;
    std::vector<double> markers_;
    double cost_ = 0.0;
    SessionStatus status_ = SessionStatus::Editing;
    std::optional<Realization> realized_;
};

double marker_cost(BuilderSession& session);

/// Pairs (x_(i), xi_i). Throws NotSubmitted.
MarginalInference infer_marginal_points(const BuilderSession& session);

Realization realize_outcome(BuilderSession& session, std::uint64_t seed);

/// Uniform state in [0, N) for a seed; the draw used by realize_outcome.
int draw_state(std::uint64_t seed, int N);

}  // namespace wealthdist
