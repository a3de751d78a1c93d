#include "wealthdist/simulator.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace wealthdist {
namespace {

constexpr std::size_t kBlock = 1024;

struct TimeGrid {
    std::vector<double> t;           ///< fine nodes
    std::vector<double> A;           ///< A at fine nodes
    std::vector<int> snapshot;       ///< snapshot column per fine node, -1 if none
    std::vector<double> snap_times;
    std::vector<double> snap_pi_scale;  ///< |sigma^{-1} lambda| at each snapshot
    std::size_t target_index = 0;
};

TimeGrid build_grid(const MarketCurves& curves, const SimulationConfig& cfg, double target) {
    const double T = cfg.horizon;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(T / cfg.dt - 1e-9)));
    std::vector<double> coarse;
    for (std::size_t k = 0; k <= n; ++k) coarse.push_back(T * static_cast<double>(k) / static_cast<double>(n));
    coarse.back() = T;
    const auto it = std::lower_bound(coarse.begin(), coarse.end(), target);
    std::size_t target_coarse = static_cast<std::size_t>(it - coarse.begin());
    if (it != coarse.end() && std::abs(*it - target) <= 1e-12 * T) {
        *it = target;
    } else if (it != coarse.begin() && std::abs(*(it - 1) - target) <= 1e-12 * T) {
        --target_coarse;
        coarse[target_coarse] = target;
    } else {
        coarse.insert(it, target);
    }

    TimeGrid g;
    for (std::size_t j = 0; j + 1 < coarse.size(); ++j) {
        g.t.push_back(coarse[j]);
        g.t.push_back(0.5 * (coarse[j] + coarse[j + 1]));
    }
    g.t.push_back(coarse.back());
    for (double t : g.t) g.A.push_back(curves.A(t));

    const std::size_t last = coarse.size() - 1;
    std::vector<std::size_t> picks;
    const int m = std::max(1, cfg.snapshots);
    for (int j = 0; j <= m; ++j) {
        picks.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(j) * static_cast<double>(last) / m)));
    }
    picks.push_back(target_coarse);
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());

    g.snapshot.assign(g.t.size(), -1);
    for (std::size_t c = 0; c < picks.size(); ++c) {
        const std::size_t f = 2 * picks[c];
        g.snapshot[f] = static_cast<int>(c);
        g.snap_times.push_back(g.t[f]);
        g.snap_pi_scale.push_back(curves.sigma_inv_lambda(std::min(g.t[f], T)).norm());
        if (picks[c] == target_coarse) g.target_index = c;
    }
    return g;
}

class Evaluator {
public:
    virtual ~Evaluator() = default;
    /// Fills value and derivative at a fine node; false when x leaves the cached range.
    virtual bool evaluate(std::size_t node, std::span<const double> x, std::span<double> v,
                          std::span<double> d) const = 0;
};

class DirectEvaluator final : public Evaluator {
public:
    DirectEvaluator(const HarmonicFunction& h, const std::vector<double>& A) : h_(h), A_(A) {}
    bool evaluate(std::size_t node, std::span<const double> x, std::span<double> v,
                  std::span<double> d) const override {
        h_.evaluate(x, A_[node], v, d);
        return true;
    }

private:
    const HarmonicFunction& h_;
    const std::vector<double>& A_;
};

// Cubic Hermite tables of h and h_x at each needed node, centered where paths
// concentrate: xi0 + A_t + M_t with sd(M_t) <= sqrt(A_T).
class TableEvaluator final : public Evaluator {
public:
    TableEvaluator(const HarmonicFunction& h, const std::vector<double>& A, const std::vector<bool>& needed,
                   double xi0, double half_width, int points, unsigned threads)
        : slices_(A.size()) {
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr err;
        auto worker = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= A.size()) return;
                if (!needed[k]) continue;
                try {
                    slices_[k] = build(h, xi0 + A[k], half_width, A[k], points);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    }

    bool evaluate(std::size_t node, std::span<const double> x, std::span<double> v,
                  std::span<double> d) const override {
        const Slice& s = slices_[node];
        bool inside = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double pos = (x[i] - s.lo) / s.step;
            if (!(pos >= 0.0 && pos <= static_cast<double>(s.v.size() - 1))) {
                inside = false;
                v[i] = d[i] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const auto j = std::min(static_cast<std::size_t>(pos), s.v.size() - 2);
            const double u = pos - static_cast<double>(j);
            const double u2 = u * u;
            const double u3 = u2 * u;
            const double h00 = 2 * u3 - 3 * u2 + 1;
            const double h10 = u3 - 2 * u2 + u;
            const double h01 = -2 * u3 + 3 * u2;
            const double h11 = u3 - u2;
            v[i] = h00 * s.v[j] + h10 * s.step * s.d[j] + h01 * s.v[j + 1] + h11 * s.step * s.d[j + 1];
            d[i] = h00 * s.d[j] + h10 * s.step * s.dd[j] + h01 * s.d[j + 1] + h11 * s.step * s.dd[j + 1];
        }
        return inside;
    }

private:
    struct Slice {
        double lo = 0.0;
        double step = 1.0;
        std::vector<double> v, d, dd;
    };

    static Slice build(const HarmonicFunction& h, double center, double half, double s, int points) {
        Slice out;
        out.lo = center - half;
        out.step = 2.0 * half / (points - 1);
        const auto n = static_cast<std::size_t>(points);
        out.v.resize(n);
        out.d.resize(n);
        out.dd.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::tie(out.v[i], out.d[i]) = h.value_and_derivative(out.lo + out.step * static_cast<double>(i), s);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = i == 0 ? 0 : i - 1;
            const std::size_t b = i + 1 == n ? n - 1 : i + 1;
            out.dd[i] = (out.d[b] - out.d[a]) / (out.step * static_cast<double>(b - a));
        }
        return out;
    }

    std::vector<Slice> slices_;
};

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    return m;
}

double quantile_of(std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * sorted[i] + w * sorted[i + 1];
}

}  // namespace

std::string_view to_string(PolicyMode mode) noexcept {
    return mode == PolicyMode::Fixed ? "fixed" : "forward";
}

void SimulationConfig::validate() const {
    if (path_count == 0) fail(ErrorCode::InvalidParameter, "path_count must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::InvalidParameter, "horizon must be positive");
    if (!(dt > 0.0) || dt > horizon / 100.0 * (1.0 + 1e-12)) {
        fail(ErrorCode::InvalidParameter, "dt must be positive and at most horizon/100");
    }
    if (target_time && !(*target_time > 0.0 && *target_time <= horizon)) {
        fail(ErrorCode::InvalidParameter, "target_time must lie in (0, horizon]");
    }
    if (any_check() && path_count < 1000) {
        fail(ErrorCode::InvalidParameter, "statistical checks need at least 1000 paths");
    }
    if (snapshots < 1) fail(ErrorCode::InvalidParameter, "snapshots must be >= 1");
    if (slice_points < 33) fail(ErrorCode::InvalidParameter, "slice_points must be >= 33");
}

std::vector<double> PathBundle::wealth_column(std::size_t snapshot) const {
    std::vector<double> out(path_count);
    for (std::size_t p = 0; p < path_count; ++p) out[p] = wealth[p * times.size() + snapshot];
    return out;
}

PathBundle simulate(const HarmonicFunction& h, PolicyMode mode, const MarketCurves& curves, double x0,
                    const SimulationConfig& cfg) {
    cfg.validate();
    if (!(x0 > 0.0) || !std::isfinite(x0)) fail(ErrorCode::InvalidParameter, "x0 must be positive");
    if (cfg.horizon > curves.horizon() * (1.0 + 1e-12)) {
        fail(ErrorCode::TimeOutOfRange, "simulation horizon exceeds the market horizon");
    }
    const double target = cfg.target_time.value_or(cfg.horizon);
    const TimeGrid grid = build_grid(curves, cfg, target);
    const double A_end = grid.A.back();
    if (A_end > h.horizon() * (1.0 + 1e-12)) {
        fail(ErrorCode::TimeOutOfRange, "h is not defined up to the simulation horizon");
    }
    const double xi0 = h.inverse(x0, 0.0);

    const std::size_t F = grid.t.size();
    const std::size_t S = grid.snap_times.size();
    const unsigned threads =
        cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

    std::vector<bool> needed(F, cfg.self_financing);
    for (std::size_t k = 0; k < F; ++k) {
        if (grid.snapshot[k] >= 0) needed[k] = true;
    }
    needed[F - 1] = true;

    PathBundle out;
    out.mode = mode;
    out.x0 = x0;
    out.horizon = cfg.horizon;
    out.target_time = target;
    out.dt = cfg.dt;
    out.seed = cfg.seed;
    out.path_count = cfg.path_count;
    out.times = grid.snap_times;
    out.target_index = grid.target_index;

    const rng::Philox4x32 gen(cfg.seed);
    std::vector<double> root_dA(F - 1);
    for (std::size_t k = 0; k + 1 < F; ++k) root_dA[k] = std::sqrt(std::max(0.0, grid.A[k + 1] - grid.A[k]));

    auto run = [&](const Evaluator& eval) {
        out.wealth.assign(cfg.path_count * S, 0.0);
        out.portfolio_norm.assign(cfg.path_count * S, 0.0);
        out.deflator.assign(cfg.path_count * S, 0.0);
        out.euler_coarse.assign(cfg.self_financing ? cfg.path_count : 0, 0.0);
        out.euler_fine.assign(cfg.self_financing ? cfg.path_count : 0, 0.0);
        std::atomic<std::size_t> next{0};
        std::atomic<bool> outside{false};
        const std::size_t blocks = (cfg.path_count + kBlock - 1) / kBlock;
        auto worker = [&] {
            std::vector<double> M, xi, v, d, xf, xc, spare, coarse_slope;
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= blocks || outside.load()) return;
                const std::size_t p0 = b * kBlock;
                const std::size_t np = std::min(kBlock, cfg.path_count - p0);
                M.assign(np, 0.0);
                xi.resize(np);
                v.resize(np);
                d.resize(np);
                xf.assign(np, x0);
                xc.assign(np, x0);
                spare.resize(np);
                coarse_slope.assign(np, 0.0);
                for (std::size_t k = 0; k < F; ++k) {
                    const double Ak = grid.A[k];
                    if (needed[k]) {
                        for (std::size_t i = 0; i < np; ++i) xi[i] = xi0 + Ak + M[i];
                        if (!eval.evaluate(k, xi, v, d)) {
                            outside.store(true);
                            return;
                        }
                    }
                    if (const int c = grid.snapshot[k]; c >= 0) {
                        for (std::size_t i = 0; i < np; ++i) {
                            const std::size_t at = (p0 + i) * S + static_cast<std::size_t>(c);
                            out.wealth[at] = k == 0 ? x0 : v[i];
                            out.portfolio_norm[at] = d[i] * grid.snap_pi_scale[static_cast<std::size_t>(c)];
                            out.deflator[at] = std::exp(-M[i] - 0.5 * Ak);
                        }
                    }
                    if (k + 1 == F) break;
                    const double dA = grid.A[k + 1] - Ak;
                    for (std::size_t i = 0; i < np; ++i) {
                        double z;
                        if (k % 2 == 0) {
                            const auto pair = rng::normal_pair(gen.block(p0 + i, k / 2));
                            z = pair.first;
                            spare[i] = pair.second;
                        } else {
                            z = spare[i];
                        }
                        const double dm = root_dA[k] * z;
                        if (cfg.self_financing) {
                            xf[i] += d[i] * (dA + dm);
                            if (k % 2 == 0) {
                                coarse_slope[i] = d[i];
                                xc[i] += d[i] * (dA + dm);
                            } else {
                                xc[i] += coarse_slope[i] * (dA + dm);
                            }
                        }
                        M[i] += dm;
                    }
                }
                if (cfg.self_financing) {
                    for (std::size_t i = 0; i < np; ++i) {
                        out.euler_fine[p0 + i] = xf[i];
                        out.euler_coarse[p0 + i] = xc[i];
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        std::mutex err_mutex;
        std::exception_ptr err;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back([&] {
                try {
                    worker();
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    outside.store(true);
                }
            });
        }
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
        return !outside.load();
    };

    if (h.is_exp_sum()) {
        run(DirectEvaluator(h, grid.A));
        return out;
    }
    double half = 12.0 * std::sqrt(std::max(A_end, 1e-12));
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (run(TableEvaluator(h, grid.A, needed, xi0, half, cfg.slice_points, threads))) return out;
        half *= 2.0;
    }
    std::ostringstream os;
    os << "a path left the tabulated range of h (half-width " << half / 2.0 << ") after one extension";
    fail(ErrorCode::EvaluationOutOfGrid, os.str());
}

MartingaleResult martingale_check(const PathBundle& bundle, double x0) {
    const std::size_t last = bundle.times.size() - 1;
    const std::size_t S = bundle.times.size();
    const auto n = static_cast<double>(bundle.path_count);
    double mean = 0.0;
    for (std::size_t p = 0; p < bundle.path_count; ++p) {
        mean += bundle.deflator[p * S + last] * bundle.wealth[p * S + last];
    }
    mean /= n;
    double var = 0.0;
    for (std::size_t p = 0; p < bundle.path_count; ++p) {
        const double e = bundle.deflator[p * S + last] * bundle.wealth[p * S + last] - mean;
        var += e * e;
    }
    var /= (n - 1.0);
    MartingaleResult r;
    r.estimate = mean;
    r.std_error = std::sqrt(var / n);
    r.pass = std::abs(mean - x0) <= 3.0 * r.std_error;
    return r;
}

double ks_statistic(std::vector<double> sample, const TargetDistribution& dist) {
    if (sample.empty()) fail(ErrorCode::InvalidParameter, "empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double D = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = dist.cdf(sample[i]);
        D = std::max({D, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return D;
}

KsResult ks_check(const PathBundle& bundle, const TargetDistribution& dist, double at) {
    if (std::abs(at - bundle.target_time) > 1e-12 * std::max(1.0, bundle.horizon)) {
        std::ostringstream os;
        os << "KS check requested at t=" << at << " but the target date is " << bundle.target_time;
        fail(ErrorCode::TimeMismatch, os.str());
    }
    KsResult r;
    r.statistic = ks_statistic(bundle.wealth_column(bundle.target_index), dist);
    r.threshold = 1.95 / std::sqrt(static_cast<double>(bundle.path_count));
    r.pass = r.statistic < r.threshold;
    return r;
}

SelfFinancingResult self_financing_check(const PathBundle& bundle) {
    if (bundle.euler_coarse.size() != bundle.path_count) {
        fail(ErrorCode::InvalidParameter, "bundle was simulated without the self-financing check");
    }
    const std::size_t S = bundle.times.size();
    std::vector<double> rc(bundle.path_count);
    std::vector<double> rf(bundle.path_count);
    for (std::size_t p = 0; p < bundle.path_count; ++p) {
        const double x = bundle.wealth[p * S + S - 1];
        rc[p] = std::abs(bundle.euler_coarse[p] - x) / x;
        rf[p] = std::abs(bundle.euler_fine[p] - x) / x;
    }
    SelfFinancingResult r;
    r.median_coarse = median_of(std::move(rc));
    r.median_fine = median_of(std::move(rf));
    r.ratio = r.median_coarse > 0.0 ? r.median_fine / r.median_coarse : 0.0;
    r.pass = r.median_coarse < 0.01 && r.ratio >= 0.35 && r.ratio <= 0.8;
    return r;
}

QuantileFan quantile_fan(const PathBundle& bundle) {
    QuantileFan fan;
    fan.times = bundle.times;
    const std::size_t S = bundle.times.size();
    std::vector<double> w(bundle.path_count);
    std::vector<double> q(bundle.path_count);
    for (std::size_t c = 0; c < S; ++c) {
        for (std::size_t p = 0; p < bundle.path_count; ++p) {
            w[p] = bundle.wealth[p * S + c];
            q[p] = bundle.portfolio_norm[p * S + c];
        }
        std::sort(w.begin(), w.end());
        std::sort(q.begin(), q.end());
        std::vector<double> rw, rq;
        for (double level : fan.levels) {
            rw.push_back(quantile_of(w, level));
            rq.push_back(quantile_of(q, level));
        }
        fan.wealth.push_back(std::move(rw));
        fan.portfolio.push_back(std::move(rq));
    }
    return fan;
}

void write_csv(const PathBundle& bundle, std::ostream& out, std::size_t max_paths) {
    const std::size_t S = bundle.times.size();
    const std::size_t n = std::min(max_paths, bundle.path_count);
    const auto old = out.precision(17);
    out << "path,time,wealth,portfolio_norm,deflator\n";
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t c = 0; c < S; ++c) {
            out << p << ',' << bundle.times[c] << ',' << bundle.wealth[p * S + c] << ','
                << bundle.portfolio_norm[p * S + c] << ',' << bundle.deflator[p * S + c] << '\n';
        }
    }
    out.precision(old);
}

}  // namespace wealthdist
