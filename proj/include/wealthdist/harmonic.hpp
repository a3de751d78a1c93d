#pragma once

#include "wealthdist/numerics/quadrature.hpp"

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace wealthdist {

/// Positive, spatially increasing solution of g_s + g_xx / 2 = 0.
///
/// The second argument is the cumulative-variance clock s = A_t. The fixed-horizon
/// h(x, t) of the terminal problem equals g(x, A_t); the forward h is already
/// indexed by A_t. Two backings exist:
///  - exponential sums g = sum_j w_j exp(y_j x - y_j^2 s / 2), valid for all s,
///    which cover the closed-form families and every recovered measure;
///  - Gaussian convolution of terminal data T at s_end,
///    g(x, s) = E[T(x + sqrt(s_end - s) Z)], valid for s <= s_end.
class HarmonicFunction {
public:
    enum class Backing { ClosedForm, Convolution, Measure };

    struct Term {
        double weight = 0.0;
        double rate = 0.0;
    };

    /// Terminal data and its derivative at one point.
    using Terminal = std::function<std::pair<double, double>(double)>;

    static HarmonicFunction exp_sum(std::vector<Term> terms, Backing backing = Backing::ClosedForm);
    static HarmonicFunction convolution(Terminal terminal, double s_end,
                                        numerics::QuadratureSpec spec = {});

    [[nodiscard]] double value(double x, double s) const;
    [[nodiscard]] double derivative(double x, double s) const;
    [[nodiscard]] std::pair<double, double> value_and_derivative(double x, double s) const;

    /// Batch evaluation at a common s; derivative may be empty.
    void evaluate(std::span<const double> x, double s, std::span<double> value,
                  std::span<double> derivative = {}) const;

    /// x with g(x, s) = y. Throws OutOfRange when y is not in the image.
    [[nodiscard]] double inverse(double y, double s) const;

    /// g_x(w, 0) at complex w; exponential sums only.
    [[nodiscard]] std::complex<double> derivative(std::complex<double> w, double s) const;

    /// (x, s) -> g(x + c, s).
    [[nodiscard]] HarmonicFunction shifted(double c) const;
    /// (x, s) -> k g(x, s), k > 0.
    [[nodiscard]] HarmonicFunction scaled(double k) const;

    [[nodiscard]] Backing backing() const noexcept { return backing_; }
    [[nodiscard]] bool is_exp_sum() const noexcept { return !conv_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
    /// Largest admissible s: s_end for convolutions, +inf otherwise.
    [[nodiscard]] double horizon() const noexcept;

private:
    struct Convolution {
        Terminal terminal;
        double s_end = 0.0;
        numerics::QuadratureSpec spec;
    };

    HarmonicFunction() = default;
    [[nodiscard]] std::pair<double, double> raw(double x, double s) const;

    Backing backing_ = Backing::ClosedForm;
    std::vector<Term> terms_;
    std::vector<double> weights_, rates_, half_sq_;
    std::shared_ptr<const Convolution> conv_;
    double shift_ = 0.0;
    double scale_ = 1.0;
};

}  // namespace wealthdist
