#include "wealthdist/single_period.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"
#include "wealthdist/numerics/roots.hpp"
#include "wealthdist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace wealthdist {
namespace {

// log sum_i exp(v_i), stable for any spread of v.
double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

std::vector<double> discretize_lognormal(double mu, double sigma, int N) {
    if (N <= 2) fail(ErrorCode::InvalidParameter, "N must exceed 2");
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
        fail(ErrorCode::InvalidParameter, "sigma must be positive and mu finite");
    }
    std::vector<double> s(static_cast<std::size_t>(N));
    for (int i = 1; i <= N; ++i) {
        const double p = (2.0 * i - 1.0) / (2.0 * N);
        s[static_cast<std::size_t>(i - 1)] = std::exp(mu + sigma * numerics::normal_quantile(p));
    }
    std::stable_sort(s.begin(), s.end());
    return s;
}

PricingExponent solve_pricing_exponent(std::span<const double> states, double r) {
    if (states.size() < 2) fail(ErrorCode::InvalidParameter, "need at least two states");
    if (!(r > -1.0)) fail(ErrorCode::InvalidParameter, "rate must exceed -1");
    std::vector<double> logs(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!(states[i] > 0.0) || !std::isfinite(states[i])) {
            fail(ErrorCode::InvalidParameter, "stock states must be positive and finite");
        }
        logs[i] = std::log(states[i]);
    }
    const double lo_state = *std::min_element(states.begin(), states.end());
    const double hi_state = *std::max_element(states.begin(), states.end());
    const double growth = 1.0 + r;
    if (!(lo_state < growth && growth < hi_state)) {
        std::ostringstream os;
        os << "no-arbitrage requires min S < 1+r < max S; got [" << lo_state << ", " << hi_state
           << "] against " << growth;
        fail(ErrorCode::NoArbitrageViolated, os.str());
    }
    // f(b) = log(sum S^{b+1} / sum S^b) - log(1+r): log of a tilted mean of S,
    // strictly increasing in b.
    const double log_growth = std::log(growth);
    std::vector<double> tilt(logs.size());
    std::vector<double> tilt1(logs.size());
    auto f = [&](double b) {
        for (std::size_t i = 0; i < logs.size(); ++i) {
            tilt[i] = b * logs[i];
            tilt1[i] = (b + 1.0) * logs[i];
        }
        return log_sum_exp(tilt1) - log_sum_exp(tilt) - log_growth;
    };
    double lo = -100.0;
    double hi = 0.0;
    if (f(0.0) < 0.0) {
        // Mean state below 1+r: the root is positive.
        lo = 0.0;
        hi = 100.0;
        for (int k = 0; k < 30 && f(hi) < 0.0; ++k) hi *= 2.0;
        if (f(hi) < 0.0) fail(ErrorCode::RootBracketFailure, "could not bracket b above 0");
    } else if (f(0.0) > 0.0) {
        for (int k = 0; k < 30 && f(lo) > 0.0; ++k) lo *= 2.0;
        if (f(lo) > 0.0) fail(ErrorCode::RootBracketFailure, "could not bracket b below 0");
    } else {
        lo = hi = 0.0;
    }
    const double b = lo == hi ? 0.0 : numerics::bracketed_root(f, lo, hi, 0.0, 400);
    for (std::size_t i = 0; i < logs.size(); ++i) tilt[i] = b * logs[i];
    const double n = static_cast<double>(logs.size());
    const double a = -log_growth - (log_sum_exp(tilt) - std::log(n));
    return {b, a};
}

std::vector<double> state_prices(std::span<const double> states, const PricingExponent& pe) {
    std::vector<double> xi(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) xi[i] = std::exp(pe.a + pe.b * std::log(states[i]));
    return xi;
}

SinglePeriodMarket make_single_period_market(int N, double mu, double sigma, double r) {
    SinglePeriodMarket m;
    m.N = N;
    m.r = r;
    m.mu = mu;
    m.sigma = sigma;
    m.stock_states = discretize_lognormal(mu, sigma, N);
    m.pricing = solve_pricing_exponent(m.stock_states, r);
    m.state_prices = state_prices(m.stock_states, m.pricing);
    return m;
}

double distributional_price(std::span<const double> levels, std::span<const double> xi) {
    if (levels.size() != xi.size() || levels.empty()) {
        fail(ErrorCode::DimensionMismatch, "levels and state prices differ in length");
    }
    std::vector<double> x(levels.begin(), levels.end());
    std::vector<double> p(xi.begin(), xi.end());
    std::sort(x.begin(), x.end());
    std::sort(p.begin(), p.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * x[i];
    return s / static_cast<double>(x.size());
}

std::string_view to_string(SessionStatus status) noexcept {
    switch (status) {
        case SessionStatus::Editing: return "editing";
        case SessionStatus::Submittable: return "submittable";
        case SessionStatus::Submitted: return "submitted";
        case SessionStatus::Realized: return "realized";
    }
    return "editing";
}

BuilderSession::BuilderSession(SinglePeriodMarket market, double budget)
    : market_(std::move(market)), budget_(budget),
      markers_(static_cast<std::size_t>(market_.N), 0.0) {
    if (!(budget > 0.0) || !std::isfinite(budget)) fail(ErrorCode::InvalidParameter, "budget must be positive");
    marker_cost();
}

double BuilderSession::place_markers(std::vector<double> levels) {
    if (status_ == SessionStatus::Submitted || status_ == SessionStatus::Realized) {
        fail(ErrorCode::IllegalTransition, "markers are frozen after submission");
    }
    if (levels.size() != markers_.size()) {
        std::ostringstream os;
        os << "expected " << markers_.size() << " markers, got " << levels.size();
        fail(ErrorCode::DimensionMismatch, os.str());
    }
    for (double v : levels) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidParameter, "marker levels must be finite and >= 0");
    }
    std::stable_sort(levels.begin(), levels.end());
    markers_ = std::move(levels);
    return marker_cost();
}

double BuilderSession::marker_cost() {
    cost_ = distributional_price(markers_, market_.state_prices);
    if (status_ == SessionStatus::Editing || status_ == SessionStatus::Submittable) {
        const bool in_band = cost_ >= kSubmitBandLow * budget_ && cost_ <= budget_ * (1.0 + kCostRoundoff);
        status_ = in_band ? SessionStatus::Submittable : SessionStatus::Editing;
    }
    return cost_;
}

MarginalInference BuilderSession::submit() {
    if (status_ != SessionStatus::Submittable) {
        std::ostringstream os;
        os << "cannot submit from status '" << to_string(status_) << "' (cost " << cost_ << ", band ["
           << kSubmitBandLow * budget_ << ", " << budget_ << "])";
        fail(ErrorCode::IllegalTransition, os.str());
    }
    status_ = SessionStatus::Submitted;
    return infer_marginal_points(*this);
}

Realization BuilderSession::realize(std::uint64_t seed) {
    if (status_ == SessionStatus::Realized) fail(ErrorCode::IllegalTransition, "session already realized");
    if (status_ != SessionStatus::Submitted) fail(ErrorCode::NotSubmitted, "submit before realizing");
    const int state = draw_state(seed, market_.N);
    realized_ = Realization{state, markers_[static_cast<std::size_t>(state)]};
    status_ = SessionStatus::Realized;
    return *realized_;
}

double marker_cost(BuilderSession& session) { return session.marker_cost(); }

MarginalInference infer_marginal_points(const BuilderSession& session) {
    if (session.status() != SessionStatus::Submitted && session.status() != SessionStatus::Realized) {
        fail(ErrorCode::NotSubmitted, "marginal points need a submitted session");
    }
    // Markers ascend and xi is sorted descending: the lowest wealth sits on the
    // most expensive state.
    std::vector<double> xi = session.market().state_prices;
    std::sort(xi.begin(), xi.end(), std::greater<>());
    MarginalInference out;
    const auto& x = session.markers();
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.points.push_back({x[i], xi[i]});
        if (i > 0 && x[i] == x[i - 1] && xi[i] != xi[i - 1]) out.degenerate = true;
    }
    return out;
}

Realization realize_outcome(BuilderSession& session, std::uint64_t seed) { return session.realize(seed); }

int draw_state(std::uint64_t seed, int N) {
    if (N <= 0) fail(ErrorCode::InvalidParameter, "N must be positive");
    const auto block = rng::Philox4x32(seed).block(0, 0);
    const double u = rng::to_unit(block[0], block[1]);
    return std::min(N - 1, static_cast<int>(u * N));
}

}  // namespace wealthdist
