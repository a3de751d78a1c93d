#pragma once

#include <Eigen/Dense>

#include <vector>

namespace wealthdist {

/// Coefficients held constant on [t_start, t_end).
struct MarketPiece {
    double t_start = 0.0;
    double t_end = 0.0;
    double rate = 0.0;
    Eigen::VectorXd drift;
    Eigen::MatrixXd vol;
};

/// Deterministic piecewise-constant market with d assets on [0, horizon].
struct MarketSpec {
    int d = 1;
    double horizon = 1.0;
    std::vector<MarketPiece> pieces;
    double lambda_min = 1e-6;  ///< c0
    double lambda_max = 1e3;   ///< c1

    /// Single piece with constant coefficients.
    static MarketSpec constant(double rate, const Eigen::VectorXd& drift, const Eigen::MatrixXd& vol,
                               double horizon);
    /// One asset, constant coefficients.
    static MarketSpec black_scholes(double rate, double drift, double vol, double horizon);
};

/// Market price of risk and its cumulative square, the A-clock.
///
/// lambda = (sigma^T)^{-1}(mu - r 1) on each piece; A(t) = int_0^t |lambda|^2 is
/// exact and piecewise linear. Jumps of |lambda| between pieces are allowed.
class MarketCurves {
public:
    /// Throws SingularVolatility, RiskPriceOutOfBounds, InvalidParameter.
    explicit MarketCurves(MarketSpec spec);

    [[nodiscard]] const MarketSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] int dimension() const noexcept { return spec_.d; }
    [[nodiscard]] double horizon() const noexcept { return spec_.horizon; }

    /// A(t); throws TimeOutOfRange outside [0, T].
    [[nodiscard]] double cumulative_variance(double t) const;
    [[nodiscard]] double A(double t) const { return cumulative_variance(t); }
    [[nodiscard]] double A_T() const noexcept { return cumulative_.back(); }

    /// Calendar time with A(t) = a, for a in [0, A_T].
    [[nodiscard]] double time_of(double a) const;

    [[nodiscard]] const Eigen::VectorXd& lambda(double t) const;
    [[nodiscard]] const Eigen::VectorXd& sigma_inv_lambda(double t) const;
    [[nodiscard]] double rate(double t) const;

    [[nodiscard]] std::size_t piece_index(double t) const;

private:
    MarketSpec spec_;
    std::vector<Eigen::VectorXd> lambda_;
    std::vector<Eigen::VectorXd> sigma_inv_lambda_;
    std::vector<double> lambda_sq_;
    std::vector<double> cumulative_;  ///< A at each piece start, plus A_T
};

/// Free-function form of MarketCurves construction.
MarketCurves build_curves(const MarketSpec& spec);

double cumulative_variance(const MarketCurves& curves, double t);

}  // namespace wealthdist
