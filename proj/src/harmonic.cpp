#include "wealthdist/harmonic.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/numerics/roots.hpp"
#include "wealthdist/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wealthdist {

HarmonicFunction HarmonicFunction::exp_sum(std::vector<Term> terms, Backing backing) {
    if (terms.empty()) fail(ErrorCode::InvalidParameter, "harmonic function needs at least one term");
    for (const auto& t : terms) {
        if (!(t.weight > 0.0) || !(t.rate > 0.0) || !std::isfinite(t.weight) ||
            !std::isfinite(t.rate)) {
            fail(ErrorCode::InvalidParameter, "exponential terms need positive weight and rate");
        }
    }
    HarmonicFunction h;
    h.backing_ = backing;
    for (const auto& t : terms) {
        h.weights_.push_back(t.weight);
        h.rates_.push_back(t.rate);
        h.half_sq_.push_back(0.5 * t.rate * t.rate);
    }
    h.terms_ = std::move(terms);
    return h;
}

HarmonicFunction HarmonicFunction::convolution(Terminal terminal, double s_end,
                                               numerics::QuadratureSpec spec) {
    spec.validate();
    HarmonicFunction h;
    h.backing_ = Backing::Convolution;
    h.conv_ = std::make_shared<const Convolution>(Convolution{std::move(terminal), s_end, spec});
    return h;
}

double HarmonicFunction::horizon() const noexcept {
    return conv_ ? conv_->s_end : std::numeric_limits<double>::infinity();
}

std::pair<double, double> HarmonicFunction::raw(double x, double s) const {
    if (!conv_) {
        double v = 0.0;
        double d = 0.0;
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            const double e = weights_[j] * std::exp(rates_[j] * x - half_sq_[j] * s);
            v += e;
            d += rates_[j] * e;
        }
        return {v, d};
    }
    const double remaining = conv_->s_end - s;
    if (remaining < -1e-12) {
        std::ostringstream os;
        os << "s = " << s << " beyond convolution horizon " << conv_->s_end;
        fail(ErrorCode::TimeOutOfRange, os.str());
    }
    if (remaining < 1e-10) return conv_->terminal(x);
    return numerics::gaussian_integrate_pair(conv_->terminal, x, remaining, conv_->spec);
}

std::pair<double, double> HarmonicFunction::value_and_derivative(double x, double s) const {
    const auto [v, d] = raw(x + shift_, s);
    return {scale_ * v, scale_ * d};
}

double HarmonicFunction::value(double x, double s) const { return value_and_derivative(x, s).first; }

double HarmonicFunction::derivative(double x, double s) const {
    return value_and_derivative(x, s).second;
}

void HarmonicFunction::evaluate(std::span<const double> x, double s, std::span<double> value,
                                std::span<double> derivative) const {
    if (value.size() < x.size() || (!derivative.empty() && derivative.size() < x.size())) {
        fail(ErrorCode::DimensionMismatch, "output spans too short");
    }
    if (!conv_) {
        const std::size_t n = weights_.size();
        std::vector<double> offset(n);
        for (std::size_t j = 0; j < n; ++j) offset[j] = rates_[j] * shift_ - half_sq_[j] * s;
        simd::active().exp_sum(x.data(), x.size(), weights_.data(), rates_.data(), offset.data(), n,
                               value.data(), derivative.empty() ? nullptr : derivative.data());
        if (scale_ != 1.0) {
            for (std::size_t i = 0; i < x.size(); ++i) value[i] *= scale_;
            if (!derivative.empty()) {
                for (std::size_t i = 0; i < x.size(); ++i) derivative[i] *= scale_;
            }
        }
        return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [v, d] = value_and_derivative(x[i], s);
        value[i] = v;
        if (!derivative.empty()) derivative[i] = d;
    }
}

double HarmonicFunction::inverse(double y, double s) const {
    if (!(y > 0.0)) fail(ErrorCode::OutOfRange, "harmonic functions are positive");
    if (!conv_ && weights_.size() == 1) {
        return (std::log(y / (scale_ * weights_[0])) + half_sq_[0] * s) / rates_[0] - shift_;
    }
    // Bracket in log space; log g is increasing and roughly linear for large |x|.
    auto f = [this, s](double x) { return std::log(value(x, s)); };
    return numerics::monotone_inverse_unbounded(f, std::log(y), 0.0, 1.0, 1e-15);
}

std::complex<double> HarmonicFunction::derivative(std::complex<double> w, double s) const {
    if (conv_) fail(ErrorCode::NoAnalyticExtension, "complex evaluation needs an exponential sum");
    std::complex<double> d = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        d += weights_[j] * rates_[j] * std::exp(rates_[j] * (w + shift_) - half_sq_[j] * s);
    }
    return scale_ * d;
}

HarmonicFunction HarmonicFunction::shifted(double c) const {
    HarmonicFunction h = *this;
    h.shift_ += c;
    return h;
}

HarmonicFunction HarmonicFunction::scaled(double k) const {
    if (!(k > 0.0)) fail(ErrorCode::InvalidParameter, "scale factor must be positive");
    HarmonicFunction h = *this;
    h.scale_ *= k;
    return h;
}

}  // namespace wealthdist
