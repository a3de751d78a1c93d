#pragma once

#include "wealthdist/distributions.hpp"
#include "wealthdist/harmonic.hpp"
#include "wealthdist/market.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace wealthdist {

/// Which engine produced h. Both evaluate h(xi, A_t): the fixed-horizon h is
/// already stored on the A-clock, so the mode only labels the bundle.
enum class PolicyMode { Fixed, Forward };

std::string_view to_string(PolicyMode mode) noexcept;

struct SimulationConfig {
    std::size_t path_count = 100000;
    double dt = 1e-3;     ///< coarse step in calendar time; the fine grid halves it
    double horizon = 1.0;
    /// Target date inserted into the grid; defaults to the horizon.
    std::optional<double> target_time;
    std::uint64_t seed = 0;
    bool martingale = true;
    bool ks = true;
    bool self_financing = true;
    int snapshots = 20;        ///< evenly spaced snapshot dates besides target and horizon
    unsigned threads = 0;      ///< 0 picks hardware concurrency
    int slice_points = 513;    ///< table size for convolution-backed h

    [[nodiscard]] bool any_check() const noexcept { return martingale || ks || self_financing; }
    /// Throws InvalidParameter.
    void validate() const;
};

/// Simulated optimal wealth X*, portfolio norm |pi*| and deflator Z at snapshot dates.
struct PathBundle {
    PolicyMode mode = PolicyMode::Fixed;
    double x0 = 0.0;
    double horizon = 0.0;
    double target_time = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::size_t path_count = 0;
    std::vector<double> times;      ///< snapshot dates
    std::size_t target_index = 0;   ///< snapshot holding the target date
    /// Row-major [path][snapshot].
    std::vector<double> wealth;
    std::vector<double> portfolio_norm;
    std::vector<double> deflator;
    /// Terminal wealth from Euler on the wealth equation at dt and dt/2.
    std::vector<double> euler_coarse;
    std::vector<double> euler_fine;

    [[nodiscard]] std::size_t snapshot_count() const noexcept { return times.size(); }
    [[nodiscard]] double wealth_at(std::size_t path, std::size_t snapshot) const {
        return wealth[path * times.size() + snapshot];
    }
    /// Wealth of every path at one snapshot.
    [[nodiscard]] std::vector<double> wealth_column(std::size_t snapshot) const;
};

/// X*_t = h(h^{-1}(x0, 0) + A_t + M_t, A_t), pi*_t = h_x(...) sigma^{-1} lambda(t),
/// Z_t = exp(-M_t - A_t/2), with exact Gaussian increments of M.
/// Throws InvalidParameter, TimeOutOfRange, EvaluationOutOfGrid.
PathBundle simulate(const HarmonicFunction& h, PolicyMode mode, const MarketCurves& curves, double x0,
                    const SimulationConfig& config);

struct MartingaleResult {
    double estimate = 0.0;
    double std_error = 0.0;
    bool pass = false;
};

/// mean(Z_T X*_T) against x0 within 3 standard errors.
MartingaleResult martingale_check(const PathBundle& bundle, double x0);

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// One-sample Kolmogorov-Smirnov of X*_at against F; pass iff D < 1.95/sqrt(n).
/// Throws TimeMismatch unless `at` is the target date.
KsResult ks_check(const PathBundle& bundle, const TargetDistribution& dist, double at);

/// One-sample KS statistic of a sample against a CDF.
double ks_statistic(std::vector<double> sample, const TargetDistribution& dist);

struct SelfFinancingResult {
    double median_coarse = 0.0;  ///< median |X_euler - X*| / X* at dt
    double median_fine = 0.0;    ///< same at dt/2
    double ratio = 0.0;
    bool pass = false;           ///< median_coarse < 1% and ratio in [0.35, 0.8]
};

/// Throws InvalidParameter when the bundle was simulated without Euler paths.
SelfFinancingResult self_financing_check(const PathBundle& bundle);

/// Quantiles of X* and |pi*| per snapshot, rows indexed by snapshot.
struct QuantileFan {
    std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
    std::vector<double> times;
    std::vector<std::vector<double>> wealth;
    std::vector<std::vector<double>> portfolio;
};

QuantileFan quantile_fan(const PathBundle& bundle);

/// Long-format columns path,time,wealth,portfolio_norm,deflator for the first max_paths paths.
void write_csv(const PathBundle& bundle, std::ostream& out, std::size_t max_paths);

}  // namespace wealthdist
