#pragma once

#include <complex>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

namespace wealthdist {

enum class Family { Lognormal, TransformedNormal, Markers, CustomQuantile, WholeLine };

std::string_view to_string(Family family) noexcept;

/// Growth bound on Q(z) = F^{-1}(Phi(z)): K e^{a|z|} or, subgaussian, K e^{a z^2}.
struct GrowthClass {
    enum class Kind { Exponential, Subgaussian };
    Kind kind = Kind::Exponential;
    double K = 1.0;
    double a = 0.0;
};

/// One term of Q(z) = sum_j weight * exp(rate * z).
struct ExpTerm {
    double weight = 0.0;
    double rate = 0.0;
};

namespace detail {

/// Normal-score representation of a law: Q(z) = F^{-1}(Phi(z)) and its inverse
/// S(x) = Phi^{-1}(F(x)). Working in z avoids saturating Phi in the tails.
class QuantileModel {
public:
    virtual ~QuantileModel() = default;
    [[nodiscard]] virtual double q(double z) const = 0;
    [[nodiscard]] virtual double dq(double z) const = 0;
    [[nodiscard]] virtual double score(double x) const = 0;
    [[nodiscard]] virtual bool analytic() const { return false; }
    [[nodiscard]] virtual std::complex<double> q(std::complex<double> z) const;
    [[nodiscard]] virtual std::complex<double> dq(std::complex<double> z) const;
};

}  // namespace detail

/// Desired law of future wealth. Immutable and cheap to copy.
class TargetDistribution {
public:
    TargetDistribution(Family family, std::vector<double> params,
                       std::shared_ptr<const detail::QuantileModel> model, GrowthClass growth,
                       std::vector<ExpTerm> terms = {}, double support_lower = 0.0);

    [[nodiscard]] Family family() const noexcept { return family_; }
    /// Family parameters: {b} for the parametric families, the sorted levels
    /// for markers, p then x for quantile tables, {A_T} for the whole-line example.
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }

    [[nodiscard]] double cdf(double x) const;
    [[nodiscard]] double quantile(double p) const;
    [[nodiscard]] double density(double x) const;

    /// Q(z) = F^{-1}(Phi(z)).
    [[nodiscard]] double score_quantile(double z) const { return model_->q(z); }
    [[nodiscard]] double score_quantile_derivative(double z) const { return model_->dq(z); }
    /// S(x) = Phi^{-1}(F(x)).
    [[nodiscard]] double score(double x) const { return model_->score(x); }

    /// Entire extension of Q, when the family has one in closed form.
    [[nodiscard]] bool has_analytic_extension() const noexcept { return model_->analytic(); }
    [[nodiscard]] std::complex<double> score_quantile(std::complex<double> z) const {
        return model_->q(z);
    }
    [[nodiscard]] std::complex<double> score_quantile_derivative(std::complex<double> z) const {
        return model_->dq(z);
    }

    /// Exponential-sum form of Q; empty when the family has none.
    [[nodiscard]] const std::vector<ExpTerm>& exp_terms() const noexcept { return terms_; }

    [[nodiscard]] const GrowthClass& growth() const noexcept { return growth_; }
    /// Checks Q(z) <= K e^{a|z|} (or K e^{a z^2}) on [-8, 8].
    [[nodiscard]] bool certify_growth(const GrowthClass& bound) const;

    /// 0 for positive wealth, -inf for the whole-line example.
    [[nodiscard]] double support_lower() const noexcept { return support_lower_; }

private:
    Family family_;
    std::vector<double> params_;
    std::shared_ptr<const detail::QuantileModel> model_;
    GrowthClass growth_;
    std::vector<ExpTerm> terms_;
    double support_lower_;
};

/// log X centered normal with variance b.
TargetDistribution lognormal_family(double b);

/// log(-1 + sqrt(1 + X)) centered normal with variance b.
TargetDistribution transformed_normal_family(double b);

/// Smooth law through elicited markers: monotone cubic in (z, log x) through
/// z_i = Phi^{-1}((2i-1)/2N), exponential tails continuing the end secants.
/// Tied levels collapse to one knot at their mean score.
/// Throws InvalidParameter (N < 10 or a level <= 0), DegenerateMarkers, GrowthViolation.
TargetDistribution from_markers(std::vector<double> levels);

/// Same construction through (p, x) pairs strictly increasing in both coordinates.
TargetDistribution from_quantile_table(const std::vector<std::pair<double, double>>& table);

/// F(y) = Phi(sqrt(1 + 1/A_T) H^{-1}(y)) with H(x) = int_0^x e^{z^2/2} dz.
/// Supported on the whole real line; used only to exercise the forward engine's
/// inadmissibility diagnostics.
TargetDistribution whole_line_example(double A_T);

/// G(z) = F^{-1}(Phi(c z / scale)) extended to the complex plane.
struct AnalyticQuantileExtension {
    TargetDistribution dist;
    double c = 1.0;
    double scale = 1.0;

    [[nodiscard]] std::complex<double> operator()(std::complex<double> z) const;
    [[nodiscard]] std::complex<double> derivative(std::complex<double> z) const;
    [[nodiscard]] double value(double x) const;

    /// G as an exponential sum in z (rates rescaled by c/scale); empty if none.
    [[nodiscard]] std::vector<ExpTerm> exp_terms() const;
};

/// Throws NoAnalyticExtension for marker and quantile-table families.
AnalyticQuantileExtension analytic_extension(const TargetDistribution& dist, double c,
                                             double scale);

/// G supplied directly as an exponential sum (used for assumption probes).
AnalyticQuantileExtension exp_sum_extension(std::vector<ExpTerm> terms);

/// Arbitrary entire G, for probing verify_assumptions with counterexamples.
AnalyticQuantileExtension custom_extension(
    std::shared_ptr<const detail::QuantileModel> model);

}  // namespace wealthdist
