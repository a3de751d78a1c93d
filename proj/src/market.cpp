#include "wealthdist/market.hpp"

#include "wealthdist/error.hpp"

#include <cmath>
#include <sstream>

namespace wealthdist {

MarketSpec MarketSpec::constant(double rate, const Eigen::VectorXd& drift,
                                const Eigen::MatrixXd& vol, double horizon) {
    MarketSpec spec;
    spec.d = static_cast<int>(drift.size());
    spec.horizon = horizon;
    spec.pieces.push_back({0.0, horizon, rate, drift, vol});
    return spec;
}

MarketSpec MarketSpec::black_scholes(double rate, double drift, double vol, double horizon) {
    return constant(rate, Eigen::VectorXd::Constant(1, drift), Eigen::MatrixXd::Constant(1, 1, vol),
                    horizon);
}

MarketCurves::MarketCurves(MarketSpec spec) : spec_(std::move(spec)) {
    if (spec_.d < 1) fail(ErrorCode::InvalidParameter, "asset count must be positive");
    if (!(spec_.horizon > 0.0)) fail(ErrorCode::InvalidParameter, "horizon must be positive");
    if (spec_.pieces.empty()) fail(ErrorCode::InvalidParameter, "market has no pieces");
    if (!(spec_.lambda_min > 0.0 && spec_.lambda_max >= spec_.lambda_min)) {
        fail(ErrorCode::InvalidParameter, "risk-price bounds must satisfy 0 < c0 <= c1");
    }
    const auto d = static_cast<Eigen::Index>(spec_.d);
    double expected_start = 0.0;
    cumulative_.push_back(0.0);
    for (std::size_t k = 0; k < spec_.pieces.size(); ++k) {
        const MarketPiece& p = spec_.pieces[k];
        if (std::abs(p.t_start - expected_start) > 1e-12 || !(p.t_end > p.t_start)) {
            fail(ErrorCode::InvalidParameter, "pieces must tile [0, horizon] in order");
        }
        expected_start = p.t_end;
        if (p.drift.size() != d || p.vol.rows() != d || p.vol.cols() != d) {
            fail(ErrorCode::DimensionMismatch, "drift/vol dimensions do not match d");
        }
        if (!(p.rate >= 0.0)) fail(ErrorCode::InvalidParameter, "rate must be nonnegative");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(p.vol.transpose());
        if (!lu.isInvertible()) {
            std::ostringstream os;
            os << "volatility matrix on piece " << k << " is singular";
            fail(ErrorCode::SingularVolatility, os.str());
        }
        const Eigen::VectorXd excess = p.drift - Eigen::VectorXd::Constant(d, p.rate);
        Eigen::VectorXd lam = lu.solve(excess);
        const double norm = lam.norm();
        if (norm < spec_.lambda_min || norm > spec_.lambda_max) {
            std::ostringstream os;
            os << "|lambda| = " << norm << " on piece " << k << " outside [" << spec_.lambda_min
               << ", " << spec_.lambda_max << "]";
            fail(ErrorCode::RiskPriceOutOfBounds, os.str());
        }
        Eigen::FullPivLU<Eigen::MatrixXd> vol_lu(p.vol);
        sigma_inv_lambda_.push_back(vol_lu.solve(lam));
        lambda_sq_.push_back(norm * norm);
        lambda_.push_back(std::move(lam));
        cumulative_.push_back(cumulative_.back() + norm * norm * (p.t_end - p.t_start));
    }
    if (std::abs(expected_start - spec_.horizon) > 1e-12) {
        fail(ErrorCode::InvalidParameter, "pieces must end at the horizon");
    }
}

std::size_t MarketCurves::piece_index(double t) const {
    if (!(t >= 0.0 && t <= spec_.horizon * (1.0 + 1e-14))) {
        std::ostringstream os;
        os << "t = " << t << " outside [0, " << spec_.horizon << "]";
        fail(ErrorCode::TimeOutOfRange, os.str());
    }
    std::size_t k = 0;
    while (k + 1 < spec_.pieces.size() && t >= spec_.pieces[k].t_end) ++k;
    return k;
}

double MarketCurves::cumulative_variance(double t) const {
    const std::size_t k = piece_index(t);
    const double tt = std::min(t, spec_.horizon);
    return cumulative_[k] + lambda_sq_[k] * (tt - spec_.pieces[k].t_start);
}

double MarketCurves::time_of(double a) const {
    if (!(a >= 0.0 && a <= A_T() * (1.0 + 1e-14))) {
        fail(ErrorCode::TimeOutOfRange, "cumulative variance outside [0, A_T]");
    }
    std::size_t k = 0;
    while (k + 1 < spec_.pieces.size() && a >= cumulative_[k + 1]) ++k;
    return std::min(spec_.horizon, spec_.pieces[k].t_start + (a - cumulative_[k]) / lambda_sq_[k]);
}

const Eigen::VectorXd& MarketCurves::lambda(double t) const { return lambda_[piece_index(t)]; }

const Eigen::VectorXd& MarketCurves::sigma_inv_lambda(double t) const {
    return sigma_inv_lambda_[piece_index(t)];
}

double MarketCurves::rate(double t) const { return spec_.pieces[piece_index(t)].rate; }

MarketCurves build_curves(const MarketSpec& spec) { return MarketCurves(spec); }

double cumulative_variance(const MarketCurves& curves, double t) {
    return curves.cumulative_variance(t);
}

}  // namespace wealthdist
