#include "wealthdist/forward.hpp"

#include "wealthdist/error.hpp"
#include "wealthdist/fixed_horizon.hpp"
#include "wealthdist/numerics/normal.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

namespace wealthdist {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Largest exponent x^2 / (2A) the real-line kernel tolerates before cancellation
// destroys every digit of a double result.
const double kKernelGrowthLimit = std::log(1e6);

bool is_canonical(double x0c) { return std::isfinite(x0c) && x0c > 0.0; }

struct GridInfo {
    double dx = 0.0;
    double half_width = 0.0;
    std::size_t center = 0;
};

GridInfo validate_grid(std::span<const double> x, std::span<const cplx> phi) {
    if (x.size() != phi.size()) fail(ErrorCode::InvalidParameter, "grid and samples differ in length");
    if (x.size() < 65 || x.size() % 2 == 0) {
        fail(ErrorCode::InvalidParameter, "Fourier grid needs an odd number (>= 65) of points");
    }
    const std::size_t n = x.size();
    GridInfo g;
    g.center = n / 2;
    g.half_width = x.back();
    g.dx = (x.back() - x.front()) / static_cast<double>(n - 1);
    if (!(g.dx > 0.0)) fail(ErrorCode::InvalidParameter, "Fourier grid must be increasing");
    for (std::size_t k = 0; k < n; ++k) {
        const double expected = x.front() + g.dx * static_cast<double>(k);
        if (std::abs(x[k] - expected) > 1e-9 * g.half_width ||
            std::abs(x[k] + x[n - 1 - k]) > 1e-9 * g.half_width) {
            fail(ErrorCode::InvalidParameter, "Fourier grid must be uniform and symmetric about 0");
        }
        if (!std::isfinite(phi[k].real()) || !std::isfinite(phi[k].imag())) {
            fail(ErrorCode::NonFiniteIntegrand, "non-finite Fourier sample");
        }
    }
    if (!(phi[g.center].real() > 0.0)) {
        fail(ErrorCode::RecoveryFailure, "phi(0) must be positive: the measure has no mass");
    }
    return g;
}

double relative_residual(std::span<const double> x, std::span<const cplx> phi,
                         const std::vector<Atom>& atoms) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        cplx model = 0.0;
        for (const auto& a : atoms) model += a.mass * std::polar(1.0, x[k] * a.location);
        num += std::norm(model - phi[k]);
        den += std::norm(phi[k]);
    }
    return std::sqrt(num / den);
}

// Real part of dx/2pi sum_k c_k phi_k e^{-i x_k y}: the inverse transform with
// quadrature weights c_k.
std::vector<double> invert(std::span<const double> x, std::span<const cplx> phi,
                           const std::vector<double>& coeff, const std::vector<double>& y, double dx) {
    std::vector<double> out(y.size());
    for (std::size_t m = 0; m < y.size(); ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double arg = x[k] * y[m];
            acc += coeff[k] * (phi[k].real() * std::cos(arg) + phi[k].imag() * std::sin(arg));
        }
        out[m] = acc * dx / (2.0 * kPi);
    }
    return out;
}

std::vector<double> peaks_of(const std::vector<double>& y, const std::vector<double>& f) {
    const double top = *std::max_element(f.begin(), f.end());
    std::vector<std::pair<double, double>> found;  // {height, location}
    for (std::size_t m = 1; m + 1 < f.size(); ++m) {
        if (f[m] > f[m - 1] && f[m] >= f[m + 1] && f[m] > 1e-3 * top) {
            const double curv = f[m - 1] - 2.0 * f[m] + f[m + 1];
            double shift = curv < 0.0 ? 0.5 * (f[m - 1] - f[m + 1]) / curv : 0.0;
            shift = std::clamp(shift, -0.5, 0.5);
            found.emplace_back(f[m], y[m] + shift * (y[1] - y[0]));
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> locs;
    for (const auto& p : found) locs.push_back(p.second);
    return locs;
}

// Masses for fixed locations by real least squares on the stacked samples.
Eigen::VectorXd fit_masses(std::span<const double> x, std::span<const cplx> phi,
                           const Eigen::VectorXd& loc) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index J = loc.size();
    Eigen::MatrixXd D(2 * n, J);
    Eigen::VectorXd rhs(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < J; ++j) {
            D(k, j) = std::cos(x[k] * loc(j));
            D(n + k, j) = std::sin(x[k] * loc(j));
        }
        rhs(k) = phi[k].real();
        rhs(n + k) = phi[k].imag();
    }
    return D.colPivHouseholderQr().solve(rhs);
}

// Levenberg-Marquardt on (locations, masses); returns the relative residual.
double fit_atoms(std::span<const double> x, std::span<const cplx> phi, Eigen::VectorXd& loc,
                 Eigen::VectorXd& mass) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index J = loc.size();
    double norm_phi = 0.0;
    for (const auto& p : phi) norm_phi += std::norm(p);
    norm_phi = std::sqrt(norm_phi);

    auto residual = [&](const Eigen::VectorXd& l, const Eigen::VectorXd& m, Eigen::VectorXd& r) {
        r.resize(2 * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            cplx model = 0.0;
            for (Eigen::Index j = 0; j < J; ++j) model += m(j) * std::polar(1.0, x[k] * l(j));
            r(k) = model.real() - phi[k].real();
            r(n + k) = model.imag() - phi[k].imag();
        }
        return r.squaredNorm();
    };

    Eigen::VectorXd r;
    double cost = residual(loc, mass, r);
    double mu = 1e-3;
    Eigen::MatrixXd Jm(2 * n, 2 * J);
    for (int iter = 0; iter < 300; ++iter) {
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index j = 0; j < J; ++j) {
                const double c = std::cos(x[k] * loc(j));
                const double s = std::sin(x[k] * loc(j));
                // d/dy of m e^{ixy} = i x m e^{ixy}
                Jm(k, j) = -x[k] * mass(j) * s;
                Jm(n + k, j) = x[k] * mass(j) * c;
                Jm(k, J + j) = c;
                Jm(n + k, J + j) = s;
            }
        }
        const Eigen::MatrixXd H = Jm.transpose() * Jm;
        const Eigen::VectorXd g = Jm.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            Eigen::MatrixXd Hd = H;
            Hd.diagonal() += mu * H.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd step = Hd.ldlt().solve(-g);
            const Eigen::VectorXd l_new = loc + step.head(J);
            const Eigen::VectorXd m_new = mass + step.tail(J);
            Eigen::VectorXd r_new;
            const double c_new = residual(l_new, m_new, r_new);
            if (std::isfinite(c_new) && c_new < cost) {
                const double gain = cost - c_new;
                loc = l_new;
                mass = m_new;
                r = r_new;
                cost = c_new;
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
                if (gain <= 1e-15 * cost) return std::sqrt(cost) / norm_phi;
            } else {
                mu *= 4.0;
            }
        }
        if (!improved || std::sqrt(cost) <= 1e-14 * norm_phi) break;
    }
    return std::sqrt(cost) / norm_phi;
}

double total_mass_of(const std::vector<Atom>& atoms) {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

}  // namespace

double RecoveredMeasure::inverse_moment() const {
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.location > 0.0) s += a.mass / a.location;
    }
    return s;
}

cplx RecoveredMeasure::fourier(double x) const {
    cplx s = 0.0;
    for (const auto& a : atoms) s += a.mass * std::polar(1.0, x * a.location);
    return s;
}

FourierConvention fourier_convention(const TargetDistribution& dist, const MarketCurves& curves,
                                     double T) {
    const double A = horizon_variance(curves, T);
    return is_canonical(budget_integral(dist, A)) ? FourierConvention::Canonical
                                                  : FourierConvention::Literal;
}

namespace {

cplx fourier_sample(const TargetDistribution& dist, double A, double x0c, const HarmonicFunction* h,
                    double x, const numerics::QuadratureSpec& spec) {
    const bool canonical = is_canonical(x0c);
    const double a = canonical ? -A : 0.0;
    const double norm = canonical ? x0c : 1.0;
    const double root_a = std::sqrt(A);
    const cplx w(a, x);

    if (h != nullptr) return h->derivative(w, 0.0) / norm;

    if (dist.has_analytic_extension()) {
        auto g = [&](double z) { return dist.score_quantile_derivative(w / root_a + z); };
        return numerics::gaussian_integrate_complex(g, 0.0, 1.0, spec) / (root_a * norm);
    }

    // h_x(a + ix, 0) = e^{x^2/2A} E[e^{-ix(a - Y)/A} Q'(Y/sqrt(A))/sqrt(A)], Y ~ N(a, A).
    const double growth = x * x / (2.0 * A);
    if (growth > kKernelGrowthLimit) {
        std::ostringstream os;
        os << "Fourier sample at x=" << x << " needs the quantile off the real line; the real-line"
           << " kernel loses all precision beyond |x| = " << std::sqrt(2.0 * A * kKernelGrowthLimit);
        fail(ErrorCode::IntegralDivergence, os.str());
    }
    auto g = [&](double y) -> cplx {
        const double dq = dist.score_quantile_derivative(y / root_a);
        if (!std::isfinite(dq)) {
            fail(ErrorCode::DensityVanishes, "target density vanishes inside its support");
        }
        return std::polar(dq / root_a, -x * (a - y) / A);
    };
    return std::exp(growth) * numerics::gaussian_integrate_complex(g, a, A, spec) / norm;
}

}  // namespace

cplx fourier_of_measure(const TargetDistribution& dist, const MarketCurves& curves, double T,
                        double x, const numerics::QuadratureSpec& spec) {
    const double A = horizon_variance(curves, T);
    const double x0c = budget_integral(dist, A, spec);
    std::optional<HarmonicFunction> h;
    if (!dist.exp_terms().empty() && dist.support_lower() == 0.0) h = harmonic_fixed(dist, curves, T, spec);
    return fourier_sample(dist, A, x0c, h ? &*h : nullptr, x, spec);
}

std::vector<double> fourier_grid(double X, int points) {
    if (!(X > 0.0) || points < 65 || points % 2 == 0) {
        fail(ErrorCode::InvalidParameter, "Fourier grid needs X > 0 and an odd count >= 65");
    }
    std::vector<double> x(static_cast<std::size_t>(points));
    const int half = points / 2;
    for (int k = 0; k < points; ++k) x[static_cast<std::size_t>(k)] = X * (k - half) / half;
    return x;
}

RecoveredMeasure recover_measure(std::span<const double> x, std::span<const cplx> phi,
                                 const RecoveryOptions& options) {
    const GridInfo grid = validate_grid(x, phi);
    const std::size_t n = x.size();
    const double phi0 = phi[grid.center].real();

    // Candidate locations from a Hann-windowed inversion.
    const double y_max = std::min(kPi / grid.dx, 400.0);
    const double dy_peak = kPi / (4.0 * grid.half_width);
    std::vector<double> y_peak;
    for (double y = -y_max; y <= y_max + 1e-12; y += dy_peak) y_peak.push_back(y);
    std::vector<double> hann(n);
    for (std::size_t k = 0; k < n; ++k) hann[k] = 0.5 * (1.0 + std::cos(kPi * x[k] / grid.half_width));
    const std::vector<double> windowed = invert(x, phi, hann, y_peak, grid.dx);
    const std::vector<double> peaks = peaks_of(y_peak, windowed);

    const int max_atoms = std::min<int>(options.max_atoms, static_cast<int>(peaks.size()));
    for (int J = 1; J <= max_atoms; ++J) {
        Eigen::VectorXd loc(J);
        for (int j = 0; j < J; ++j) loc(j) = peaks[static_cast<std::size_t>(j)];
        Eigen::VectorXd mass = fit_masses(x, phi, loc);
        const double res = fit_atoms(x, phi, loc, mass);
        if (!(res < options.atomic_tolerance)) continue;

        RecoveredMeasure out;
        out.form = RecoveredMeasure::Form::Atomic;
        out.fit_residual = res;
        for (int j = 0; j < J; ++j) out.atoms.push_back({loc(j), mass(j)});
        std::sort(out.atoms.begin(), out.atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.location < b.location; });
        for (const auto& a : out.atoms) {
            if (a.mass < -options.atomic_tolerance * phi0) {
                std::ostringstream os;
                os << "atom at y=" << a.location << " has negative mass " << a.mass;
                fail(ErrorCode::NegativeMass, os.str());
            }
            if (a.location <= 0.0 && a.mass > 1e-6 * phi0) {
                out.nonpositive_mass += a.mass;
            }
        }
        if (out.nonpositive_mass > 0.0 && options.enforce_support) {
            std::ostringstream os;
            os << "recovered atoms carry mass " << out.nonpositive_mass << " on y <= 0";
            fail(ErrorCode::SupportViolation, os.str());
        }
        out.total_mass = total_mass_of(out.atoms);
        out.admissible = out.nonpositive_mass == 0.0;
        return out;
    }

    // Density mode: trapezoid inversion on a grid twice as fine as the sampling resolution.
    RecoveredMeasure out;
    out.form = RecoveredMeasure::Form::Density;
    out.dy = kPi / (2.0 * grid.half_width);
    std::vector<double> y;
    for (double v = -y_max; v <= y_max + 1e-12; v += out.dy) y.push_back(v);
    std::vector<double> trap(n, 1.0);
    trap.front() = trap.back() = 0.5;
    std::vector<double> w = invert(x, phi, trap, y, grid.dx);
    const double w_max = *std::max_element(w.begin(), w.end());
    if (!(w_max > 0.0)) fail(ErrorCode::RecoveryFailure, "inverted density has no positive part");

    double negative = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
        if (std::abs(w[m]) < options.clip * w_max) w[m] = 0.0;
        if (y[m] <= 0.0) {
            out.nonpositive_mass += std::abs(w[m]) * out.dy;
        } else if (w[m] < 0.0) {
            negative -= w[m] * out.dy;
        }
    }
    if (out.nonpositive_mass > 1e-6 * phi0) {
        if (options.enforce_support) {
            std::ostringstream os;
            os << "recovered density carries mass " << out.nonpositive_mass << " on y <= 0";
            fail(ErrorCode::SupportViolation, os.str());
        }
    } else {
        out.nonpositive_mass = 0.0;
    }
    if (negative > 1e-6 * phi0) {
        std::ostringstream os;
        os << "recovered density has negative mass " << negative;
        fail(ErrorCode::NegativeMass, os.str());
    }
    for (std::size_t m = 0; m < y.size(); ++m) {
        if (w[m] <= 0.0) continue;
        if (y[m] <= 0.0 && options.enforce_support) continue;
        if (y[m] > 0.0 && y[m] < options.support_floor) {
            out.clipped_mass += w[m] * out.dy;
            continue;
        }
        out.atoms.push_back({y[m], w[m] * out.dy});
    }
    out.fit_residual = relative_residual(x, phi, out.atoms);
    if (!(out.fit_residual <= options.density_tolerance)) {
        std::ostringstream os;
        os << "density reconstruction misses the samples by " << out.fit_residual << " (relative)";
        fail(ErrorCode::RecoveryFailure, os.str());
    }
    out.total_mass = total_mass_of(out.atoms);
    out.admissible = out.nonpositive_mass == 0.0 && check_admissibility(out);
    return out;
}

bool check_admissibility(const RecoveredMeasure& measure, double horizon_probe) {
    if (!(horizon_probe >= 0.0)) fail(ErrorCode::InvalidParameter, "horizon probe must be >= 0");
    if (measure.form == RecoveredMeasure::Form::Atomic) return true;
    std::vector<double> ys;
    std::vector<double> ws;
    for (const auto& a : measure.atoms) {
        if (a.location > 0.0 && a.mass > 0.0) {
            ys.push_back(a.location);
            ws.push_back(a.mass / measure.dy);
        }
    }
    if (ys.empty()) return true;
    const std::size_t peak = static_cast<std::size_t>(std::max_element(ws.begin(), ws.end()) - ws.begin());
    const double w_max = ws[peak];
    // An abrupt cutoff means compact support: every exponential moment is finite.
    if (ws.back() > 1e-4 * w_max) return true;

    std::vector<double> ty;
    std::vector<double> tl;
    for (std::size_t i = peak; i < ys.size(); ++i) {
        if (ws[i] < 1e-2 * w_max) {
            ty.push_back(ys[i]);
            tl.push_back(std::log(ws[i]));
        }
    }
    if (ty.size() < 6) return true;

    // log w ~ c - kappa y^2 on each half of the tail.
    auto kappa = [&](std::size_t lo, std::size_t hi) {
        const double cnt = static_cast<double>(hi - lo);
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double u = ty[i] * ty[i];
            sx += u;
            sy += tl[i];
            sxx += u * u;
            sxy += u * tl[i];
        }
        return -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    };
    const std::size_t mid = ty.size() / 2;
    const double k_near = kappa(0, mid);
    const double k_far = kappa(mid, ty.size());
    const double k_all = kappa(0, ty.size());
    // Steepening tail: decays faster than any Gaussian.
    if (k_far > 1.5 * k_near && k_far > 0.0) return true;
    if (!std::isfinite(horizon_probe)) return false;
    return k_all > 0.5 * horizon_probe * (1.0 + 1e-3);
}

HarmonicFunction harmonic_from_measure(const RecoveredMeasure& measure) {
    std::vector<HarmonicFunction::Term> terms;
    for (const auto& a : measure.atoms) {
        if (!(a.location > 0.0)) {
            fail(ErrorCode::Inadmissible,
                 inadmissibility_diagnostic("the measure charges y <= 0"));
        }
        if (a.mass > 0.0) terms.push_back({a.mass / a.location, a.location});
    }
    if (terms.empty()) fail(ErrorCode::Inadmissible, inadmissibility_diagnostic("the measure is empty"));
    return HarmonicFunction::exp_sum(std::move(terms), HarmonicFunction::Backing::Measure);
}

RecoveredMeasure normalize_measure(const RecoveredMeasure& canonical, double x0, double A_T) {
    if (!(x0 > 0.0) || !(A_T > 0.0)) fail(ErrorCode::InvalidParameter, "x0 and A_T must be positive");
    RecoveredMeasure out = canonical;
    for (auto& a : out.atoms) a.mass *= x0 * std::exp(a.location * A_T);
    out.total_mass = total_mass_of(out.atoms);
    return out;
}

HarmonicFunction harmonic_from_measure(const RecoveredMeasure& canonical, double x0, double A_T) {
    return harmonic_from_measure(normalize_measure(canonical, x0, A_T));
}

std::function<double(double)> initial_datum(const RecoveredMeasure& measure) {
    const HarmonicFunction h = harmonic_from_measure(measure);
    return [h](double x) {
        if (!(x > 0.0)) fail(ErrorCode::OutOfRange, "u0' is defined for x > 0");
        return std::exp(-h.inverse(x, 0.0));
    };
}

namespace {

RecoveredMeasure with_normalization(const RecoveredMeasure& m, MassNormalization normalization) {
    if (normalization == MassNormalization::AsGiven) return m;
    RecoveredMeasure out = m;
    const double total = total_mass_of(m.atoms);
    if (!(total > 0.0)) fail(ErrorCode::Inadmissible, inadmissibility_diagnostic("the measure is empty"));
    for (auto& a : out.atoms) a.mass /= total;
    out.total_mass = 1.0;
    return out;
}

}  // namespace

PerformanceSurface::PerformanceSurface(const RecoveredMeasure& measure,
                                       MassNormalization normalization)
    : atoms_(with_normalization(measure, normalization).atoms),
      h_(harmonic_from_measure(with_normalization(measure, normalization))) {
    for (const auto& a : atoms_) {
        if (a.location <= 1.0 && a.mass > 0.0) base_point_ = 1.0;
    }
    if (base_point_ > 0.0) base_offset_ = spatial(h_.inverse(base_point_, 0.0));
}

double PerformanceSurface::spatial(double W) const {
    // int^x e^{-h0^{-1}(z)} dz with z = h0(w), dz = sum_j m_j e^{y_j w} dw.
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.mass <= 0.0) continue;
        const double k = a.location - 1.0;
        s += std::abs(k) < 1e-12 ? a.mass * W : a.mass * std::exp(k * W) / k;
    }
    return s;
}

double PerformanceSurface::operator()(double x, double s) const {
    if (!(x > 0.0)) fail(ErrorCode::OutOfRange, "the performance surface is defined for x > 0");
    if (!(s >= 0.0)) fail(ErrorCode::TimeOutOfRange, "the performance clock starts at 0");
    const double space = spatial(h_.inverse(x, 0.0)) - base_offset_;
    if (s == 0.0) return space;
    auto integrand = [&](double sigma) {
        const double W = h_.inverse(x, sigma);
        return std::exp(-W + 0.5 * sigma) * h_.derivative(W, sigma);
    };
    const double time =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, s, 15, 1e-12);
    return space - 0.5 * time;
}

std::vector<double> PerformanceSurface::sample(std::span<const double> s_grid,
                                               std::span<const double> x_grid) const {
    std::vector<double> out;
    out.reserve(s_grid.size() * x_grid.size());
    for (double s : s_grid) {
        for (double x : x_grid) out.push_back((*this)(x, s));
    }
    return out;
}

PerformanceSurface performance_surface(const RecoveredMeasure& measure,
                                       MassNormalization normalization) {
    return PerformanceSurface(measure, normalization);
}

std::string inadmissibility_diagnostic(const std::string& cause) {
    return "no forward performance process in the monotone class: " + cause +
           "; the target can only be reached with a local forward investment performance process";
}

ForwardSolution solve_forward(const TargetDistribution& dist, const MarketCurves& curves, double T,
                              double x0, const ForwardOptions& options) {
    options.quadrature.validate();
    const double A = horizon_variance(curves, T);
    const double x0c = budget_integral(dist, A, options.quadrature);
    if (dist.support_lower() == 0.0) {
        if (!(x0 > 0.0)) fail(ErrorCode::InvalidParameter, "initial wealth must be positive");
        if (std::abs(x0c - x0) > kBudgetTolerance * std::abs(x0)) {
            std::ostringstream os;
            os << "initial wealth " << x0 << " does not match the budget " << x0c;
            fail(ErrorCode::BudgetViolated, os.str());
        }
    }
    if (!dist.has_analytic_extension()) {
        fail(ErrorCode::IntegralDivergence,
             std::string("the forward transform needs an entire quantile; family '") +
                 std::string(to_string(dist.family())) +
                 "' is only known on the real line, where the transform diverges");
    }

    std::optional<HarmonicFunction> closed;
    if (!dist.exp_terms().empty() && dist.support_lower() == 0.0) {
        closed = harmonic_fixed(dist, curves, T, options.quadrature);
    }
    const std::vector<double> grid = fourier_grid(options.fourier_half_width, options.fourier_points);
    std::vector<cplx> phi(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        phi[k] = fourier_sample(dist, A, x0c, closed ? &*closed : nullptr, grid[k], options.quadrature);
    }

    RecoveredMeasure canonical;
    try {
        canonical = recover_measure(grid, phi, options.recovery);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SupportViolation || e.code() == ErrorCode::NegativeMass) {
            fail(ErrorCode::Inadmissible, inadmissibility_diagnostic(e.what()));
        }
        throw;
    }
    if (!check_admissibility(canonical)) {
        fail(ErrorCode::Inadmissible,
             inadmissibility_diagnostic("the recovered density has a Gaussian tail, so "
                                        "int e^{yx + y^2 t/2} nu(dy) diverges for large t"));
    }
    canonical.admissible = true;
    if (!is_canonical(x0c)) {
        fail(ErrorCode::Inadmissible,
             inadmissibility_diagnostic("h(-A_T, 0) is not positive"));
    }

    RecoveredMeasure measure = normalize_measure(canonical, x0, A);
    HarmonicFunction h = harmonic_from_measure(measure);
    auto datum = initial_datum(canonical);
    PerformanceSurface perf(canonical, options.performance_normalization);
    return ForwardSolution{x0,  T,     A,       x0c, FourierConvention::Canonical, grid, std::move(phi),
                           std::move(canonical), std::move(measure), std::move(h), std::move(datum),
                           std::move(perf)};
}

}  // namespace wealthdist
