#include "wealthdist/distributions.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/numerics/normal.hpp"
#include "wealthdist/numerics/roots.hpp"

// pchip in Boost 1.74 calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace wealthdist {

using numerics::normal_cdf;
using numerics::normal_pdf;
using numerics::normal_quantile;

std::string_view to_string(Family family) noexcept {
    switch (family) {
        case Family::Lognormal: return "lognormal";
        case Family::TransformedNormal: return "transformed-normal";
        case Family::Markers: return "markers";
        case Family::CustomQuantile: return "custom-quantile-table";
        case Family::WholeLine: return "whole-line-example";
    }
    return "unknown";
}

namespace detail {

std::complex<double> QuantileModel::q(std::complex<double>) const {
    fail(ErrorCode::NoAnalyticExtension, "quantile function has no closed-form entire extension");
}

std::complex<double> QuantileModel::dq(std::complex<double>) const {
    fail(ErrorCode::NoAnalyticExtension, "quantile function has no closed-form entire extension");
}

}  // namespace detail

namespace {

class ExpSumModel final : public detail::QuantileModel {
public:
    ExpSumModel(std::vector<ExpTerm> terms, std::function<double(double)> inverse)
        : terms_(std::move(terms)), inverse_(std::move(inverse)) {}

    [[nodiscard]] double q(double z) const override {
        double s = 0.0;
        for (const auto& t : terms_) s += t.weight * std::exp(t.rate * z);
        return s;
    }
    [[nodiscard]] double dq(double z) const override {
        double s = 0.0;
        for (const auto& t : terms_) s += t.weight * t.rate * std::exp(t.rate * z);
        return s;
    }
    [[nodiscard]] double score(double x) const override {
        if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
        if (inverse_) return inverse_(x);
        return numerics::monotone_inverse_unbounded([this](double z) { return std::log(q(z)); },
                                                    std::log(x), 0.0, 1.0, 1e-15);
    }
    [[nodiscard]] bool analytic() const override { return true; }
    [[nodiscard]] std::complex<double> q(std::complex<double> z) const override {
        std::complex<double> s = 0.0;
        for (const auto& t : terms_) s += t.weight * std::exp(t.rate * z);
        return s;
    }
    [[nodiscard]] std::complex<double> dq(std::complex<double> z) const override {
        std::complex<double> s = 0.0;
        for (const auto& t : terms_) s += t.weight * t.rate * std::exp(t.rate * z);
        return s;
    }

private:
    std::vector<ExpTerm> terms_;
    std::function<double(double)> inverse_;
};

/// log Q interpolated through knots (z_k, L_k), linear beyond the ends.
class SplineModel final : public detail::QuantileModel {
public:
    SplineModel(std::vector<double> z, std::vector<double> L) : z_(std::move(z)), L_(std::move(L)) {
        const std::size_t n = z_.size();
        slope_lo_ = (L_[1] - L_[0]) / (z_[1] - z_[0]);
        slope_hi_ = (L_[n - 1] - L_[n - 2]) / (z_[n - 1] - z_[n - 2]);
        if (n >= 4) {
            pchip_.emplace(std::vector<double>(z_), std::vector<double>(L_), slope_lo_, slope_hi_);
        }
    }

    [[nodiscard]] double log_q(double z) const {
        if (z <= z_.front()) return L_.front() + slope_lo_ * (z - z_.front());
        if (z >= z_.back()) return L_.back() + slope_hi_ * (z - z_.back());
        if (pchip_) return (*pchip_)(z);
        const std::size_t k = segment(z);
        const double w = (z - z_[k]) / (z_[k + 1] - z_[k]);
        return L_[k] + w * (L_[k + 1] - L_[k]);
    }
    [[nodiscard]] double dlog_q(double z) const {
        if (z <= z_.front()) return slope_lo_;
        if (z >= z_.back()) return slope_hi_;
        if (pchip_) return pchip_->prime(z);
        const std::size_t k = segment(z);
        return (L_[k + 1] - L_[k]) / (z_[k + 1] - z_[k]);
    }

    [[nodiscard]] double q(double z) const override { return std::exp(log_q(z)); }
    [[nodiscard]] double dq(double z) const override { return std::exp(log_q(z)) * dlog_q(z); }
    [[nodiscard]] double score(double x) const override {
        if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
        const double L = std::log(x);
        if (L <= L_.front()) return z_.front() + (L - L_.front()) / slope_lo_;
        if (L >= L_.back()) return z_.back() + (L - L_.back()) / slope_hi_;
        const auto it = std::upper_bound(L_.begin(), L_.end(), L);
        const std::size_t k = static_cast<std::size_t>(it - L_.begin()) - 1;
        return numerics::monotone_inverse([this](double z) { return log_q(z); }, L, z_[k],
                                          z_[k + 1], 1e-15);
    }

    [[nodiscard]] double slope_hi() const noexcept { return slope_hi_; }

private:
    [[nodiscard]] std::size_t segment(double z) const {
        const auto it = std::upper_bound(z_.begin(), z_.end(), z);
        return std::min(static_cast<std::size_t>(it - z_.begin()) - 1, z_.size() - 2);
    }

    std::vector<double> z_;
    std::vector<double> L_;
    double slope_lo_ = 0.0;
    double slope_hi_ = 0.0;
    std::optional<boost::math::interpolators::pchip<std::vector<double>>> pchip_;
};

// H(x) = sum_n x^{2n+1} / ((2n+1) 2^n n!), an entire odd function with H' = e^{x^2/2}.
template <class T>
T dawson_like(T x) {
    const T x2 = x * x;
    T term = x;  // x^{2n+1} / (2^n n!)
    T sum = x;
    for (int n = 0; n < 4000; ++n) {
        term *= x2 / (2.0 * (n + 1));
        const T add = term / (2.0 * n + 3.0);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum) && n > 2) break;
    }
    return sum;
}

class WholeLineModel final : public detail::QuantileModel {
public:
    explicit WholeLineModel(double A) : s_(std::sqrt(1.0 + 1.0 / A)) {}

    [[nodiscard]] double q(double z) const override { return dawson_like(z / s_); }
    [[nodiscard]] double dq(double z) const override {
        const double u = z / s_;
        return std::exp(0.5 * u * u) / s_;
    }
    [[nodiscard]] double score(double x) const override {
        const double u = numerics::monotone_inverse_unbounded(
            [](double v) { return dawson_like(v); }, x, 0.0, 1.0, 1e-15);
        return s_ * u;
    }
    [[nodiscard]] bool analytic() const override { return true; }
    [[nodiscard]] std::complex<double> q(std::complex<double> z) const override {
        return dawson_like(z / s_);
    }
    [[nodiscard]] std::complex<double> dq(std::complex<double> z) const override {
        const std::complex<double> u = z / s_;
        return std::exp(0.5 * u * u) / s_;
    }

    [[nodiscard]] double s() const noexcept { return s_; }

private:
    double s_;
};

GrowthClass exp_sum_growth(const std::vector<ExpTerm>& terms) {
    GrowthClass g;
    g.K = 0.0;
    g.a = 0.0;
    for (const auto& t : terms) {
        g.K += std::abs(t.weight);
        g.a = std::max(g.a, std::abs(t.rate));
    }
    return g;
}

void require_positive(double b, const char* what) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        fail(ErrorCode::InvalidParameter, std::string(what) + " must be positive");
    }
}

// Collapses ties and builds the spline model through (z_i, log x_i).
TargetDistribution from_knots(Family family, std::vector<double> params, std::vector<double> z,
                              std::vector<double> x) {
    std::vector<double> zk;
    std::vector<double> Lk;
    for (std::size_t i = 0; i < x.size();) {
        std::size_t j = i;
        double zsum = 0.0;
        while (j < x.size() && x[j] == x[i]) zsum += z[j++];
        zk.push_back(zsum / static_cast<double>(j - i));
        Lk.push_back(std::log(x[i]));
        i = j;
    }
    if (zk.size() < 2) fail(ErrorCode::DegenerateMarkers, "all levels are equal");
    auto model = std::make_shared<SplineModel>(std::move(zk), std::move(Lk));

    GrowthClass growth;
    growth.a = std::max(model->slope_hi(), 0.0);
    growth.K = 0.0;
    for (int i = 0; i <= 1600; ++i) {
        const double zz = -8.0 + 0.01 * i;
        const double v = model->q(zz);
        if (!std::isfinite(v)) fail(ErrorCode::GrowthViolation, "quantile is not finite on [-8, 8]");
        growth.K = std::max(growth.K, v * std::exp(-growth.a * std::abs(zz)));
    }
    growth.K *= 1.0 + 1e-12;
    TargetDistribution dist(family, std::move(params), model, growth);
    if (!dist.certify_growth(growth)) fail(ErrorCode::GrowthViolation, "growth certificate failed");
    return dist;
}

}  // namespace

TargetDistribution::TargetDistribution(Family family, std::vector<double> params,
                                       std::shared_ptr<const detail::QuantileModel> model,
                                       GrowthClass growth, std::vector<ExpTerm> terms,
                                       double support_lower)
    : family_(family),
      params_(std::move(params)),
      model_(std::move(model)),
      growth_(growth),
      terms_(std::move(terms)),
      support_lower_(support_lower) {}

double TargetDistribution::cdf(double x) const {
    if (x <= support_lower_) return 0.0;
    return normal_cdf(model_->score(x));
}

double TargetDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParameter, "probability must lie in (0,1)");
    return model_->q(normal_quantile(p));
}

double TargetDistribution::density(double x) const {
    if (x <= support_lower_) return 0.0;
    const double z = model_->score(x);
    if (!std::isfinite(z)) return 0.0;
    return normal_pdf(z) / model_->dq(z);
}

bool TargetDistribution::certify_growth(const GrowthClass& bound) const {
    for (int i = 0; i <= 1600; ++i) {
        const double z = -8.0 + 0.01 * i;
        const double v = std::abs(model_->q(z));
        const double cap = bound.kind == GrowthClass::Kind::Exponential
                               ? bound.K * std::exp(bound.a * std::abs(z))
                               : bound.K * std::exp(bound.a * z * z);
        if (!(v <= cap * (1.0 + 1e-12))) return false;
    }
    return true;
}

TargetDistribution lognormal_family(double b) {
    require_positive(b, "lognormal variance b");
    const double r = std::sqrt(b);
    std::vector<ExpTerm> terms{{1.0, r}};
    auto model = std::make_shared<ExpSumModel>(terms, [r](double x) { return std::log(x) / r; });
    GrowthClass growth{GrowthClass::Kind::Exponential, 1.0, r};
    return TargetDistribution(Family::Lognormal, {b}, model, growth, terms);
}

TargetDistribution transformed_normal_family(double b) {
    require_positive(b, "transformed-normal variance b");
    const double r = std::sqrt(b);
    std::vector<ExpTerm> terms{{1.0, 2.0 * r}, {2.0, r}};
    // e^{2u} + 2e^u = x  <=>  e^u = sqrt(1+x) - 1 = x / (sqrt(1+x) + 1)
    auto inverse = [r](double x) { return std::log(x / (std::sqrt(1.0 + x) + 1.0)) / r; };
    auto model = std::make_shared<ExpSumModel>(terms, inverse);
    return TargetDistribution(Family::TransformedNormal, {b}, model, exp_sum_growth(terms), terms);
}

TargetDistribution from_markers(std::vector<double> levels) {
    const std::size_t n = levels.size();
    if (n < 10) fail(ErrorCode::InvalidParameter, "at least 10 markers are required");
    for (double v : levels) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            fail(ErrorCode::InvalidParameter, "marker levels must be positive and finite");
        }
    }
    std::stable_sort(levels.begin(), levels.end());
    if (levels.front() == levels.back()) fail(ErrorCode::DegenerateMarkers, "all markers are equal");
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = normal_quantile((2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
    }
    std::vector<double> params = levels;
    return from_knots(Family::Markers, std::move(params), std::move(z), std::move(levels));
}

TargetDistribution from_quantile_table(const std::vector<std::pair<double, double>>& table) {
    if (table.size() < 2) fail(ErrorCode::InvalidParameter, "quantile table needs two rows");
    std::vector<double> z;
    std::vector<double> x;
    std::vector<double> params;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto [p, v] = table[i];
        if (!(p > 0.0 && p < 1.0) || !(v > 0.0) || !std::isfinite(v)) {
            fail(ErrorCode::InvalidParameter, "quantile rows need p in (0,1) and x > 0");
        }
        if (i > 0 && !(p > table[i - 1].first && v > table[i - 1].second)) {
            fail(ErrorCode::InvalidParameter, "quantile rows must increase in p and x");
        }
        z.push_back(normal_quantile(p));
        x.push_back(v);
    }
    for (const auto& row : table) params.push_back(row.first);
    for (const auto& row : table) params.push_back(row.second);
    return from_knots(Family::CustomQuantile, std::move(params), std::move(z), std::move(x));
}

TargetDistribution whole_line_example(double A_T) {
    require_positive(A_T, "A_T");
    auto model = std::make_shared<WholeLineModel>(A_T);
    const double s = model->s();
    // |H(u)| <= e^{u^2/2} for all u, so |Q(z)| <= e^{z^2 / (2 s^2)}.
    GrowthClass growth{GrowthClass::Kind::Subgaussian, 1.0, 0.5 / (s * s)};
    return TargetDistribution(Family::WholeLine, {A_T}, model, growth, {},
                              -std::numeric_limits<double>::infinity());
}

std::complex<double> AnalyticQuantileExtension::operator()(std::complex<double> z) const {
    return dist.score_quantile(c * z / scale);
}

std::complex<double> AnalyticQuantileExtension::derivative(std::complex<double> z) const {
    return dist.score_quantile_derivative(c * z / scale) * (c / scale);
}

double AnalyticQuantileExtension::value(double x) const { return dist.score_quantile(c * x / scale); }

std::vector<ExpTerm> AnalyticQuantileExtension::exp_terms() const {
    std::vector<ExpTerm> out;
    for (const auto& t : dist.exp_terms()) out.push_back({t.weight, t.rate * c / scale});
    return out;
}

AnalyticQuantileExtension analytic_extension(const TargetDistribution& dist, double c,
                                             double scale) {
    require_positive(c, "c");
    require_positive(scale, "scale");
    if (dist.family() != Family::Lognormal && dist.family() != Family::TransformedNormal) {
        fail(ErrorCode::NoAnalyticExtension,
             std::string("family '") + std::string(to_string(dist.family())) +
                 "' has no closed-form entire quantile extension; use the terminal or forward "
                 "engine instead");
    }
    return {dist, c, scale};
}

AnalyticQuantileExtension exp_sum_extension(std::vector<ExpTerm> terms) {
    auto model = std::make_shared<ExpSumModel>(terms, nullptr);
    TargetDistribution dist(Family::CustomQuantile, {}, model, exp_sum_growth(terms), terms);
    return {dist, 1.0, 1.0};
}

AnalyticQuantileExtension custom_extension(std::shared_ptr<const detail::QuantileModel> model) {
    TargetDistribution dist(Family::CustomQuantile, {}, std::move(model), GrowthClass{});
    return {dist, 1.0, 1.0};
}

}  // namespace wealthdist
