#pragma once

#include "wealthdist/distributions.hpp"
#include "wealthdist/harmonic.hpp"
#include "wealthdist/market.hpp"
#include "wealthdist/numerics/quadrature.hpp"

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wealthdist {

/// Point mass of a measure on (0, inf).
struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Measure nu recovered from samples of its Fourier transform.
///
/// Density results are stored as grid atoms of mass w(y) dy, so every measure
/// is a finite sum of point masses for evaluation purposes.
struct RecoveredMeasure {
    enum class Form { Atomic, Density };

    Form form = Form::Atomic;
    std::vector<Atom> atoms;
    double dy = 0.0;               ///< grid spacing, density form only
    double total_mass = 0.0;
    double fit_residual = 0.0;     ///< relative L2 misfit against the samples
    double clipped_mass = 0.0;     ///< density mass dropped below the support floor
    double nonpositive_mass = 0.0; ///< density mass found on y <= 0
    bool admissible = false;

    [[nodiscard]] double inverse_moment() const;  ///< int nu(dy) / y over y > 0
    [[nodiscard]] std::complex<double> fourier(double x) const;
};

/// How the transform of nu is read off h.
///
/// Canonical divides by x0 = h(-A_T, 0) and shifts by -A_T, so that
/// phi(x) = h_x(ix - A_T, 0) / x0 and int nu(dy)/y = 1. Literal uses h_x(ix, 0)
/// unchanged and is chosen when x0 <= 0 (wealth on the whole line).
enum class FourierConvention { Canonical, Literal };

FourierConvention fourier_convention(const TargetDistribution& dist, const MarketCurves& curves,
                                     double T);

/// phi_nu(x). Closed form for exponential-sum families, complex Gauss-Hermite
/// for other entire quantiles, and the real-line kernel for the rest, which is
/// only usable for small |x| (IntegralDivergence beyond). Throws DensityVanishes.
std::complex<double> fourier_of_measure(const TargetDistribution& dist, const MarketCurves& curves,
                                        double T, double x, const numerics::QuadratureSpec& spec = {});

/// Symmetric uniform grid on [-X, X].
std::vector<double> fourier_grid(double X = 40.0, int points = 1025);

struct RecoveryOptions {
    int max_atoms = 8;
    double atomic_tolerance = 1e-6;
    double density_tolerance = 1e-4;
    double clip = 1e-8;
    double support_floor = 1e-4;
    /// When false, mass on y <= 0 is reported in nonpositive_mass instead of raising.
    bool enforce_support = true;
};

/// Atomic least-squares fit first (peaks of a Hann-windowed inversion, then
/// Levenberg-Marquardt on locations and masses); density mode otherwise.
/// Throws RecoveryFailure, NegativeMass, SupportViolation, InvalidParameter.
RecoveredMeasure recover_measure(std::span<const double> x,
                                 std::span<const std::complex<double>> phi,
                                 const RecoveryOptions& options = {});

/// Whether int e^{yx + y^2 t / 2} nu(dy) < inf for t up to horizon_probe.
/// Atomic and compactly supported measures always qualify; other densities are
/// judged from a fitted Gaussian tail rate.
bool check_admissibility(const RecoveredMeasure& measure,
                         double horizon_probe = std::numeric_limits<double>::infinity());

/// h(x, s) = sum_j (m_j / y_j) e^{y_j x - y_j^2 s / 2}. Throws Inadmissible.
HarmonicFunction harmonic_from_measure(const RecoveredMeasure& measure);

/// Same measure rescaled to nu = x0 e^{A_T y} nu_canonical, so h(-A_T, 0) = x0.
HarmonicFunction harmonic_from_measure(const RecoveredMeasure& canonical, double x0, double A_T);

/// Budget-normalized copy of a canonical measure.
RecoveredMeasure normalize_measure(const RecoveredMeasure& canonical, double x0, double A_T);

/// u0'(x) = exp(-h0^{-1}(x)) with h0 = h(., 0).
std::function<double(double)> initial_datum(const RecoveredMeasure& measure);

/// Which representative of nu the performance surface integrates.
enum class MassNormalization { UnitTotalMass, AsGiven };

/// u(x, s) on the A-clock; the forward performance is U(x, t) = u(x, A_t).
class PerformanceSurface {
public:
    PerformanceSurface(const RecoveredMeasure& measure, MassNormalization normalization);

    [[nodiscard]] double operator()(double x, double s) const;
    /// 0, or 1 when nu((0,1]) > 0 and u is fixed only up to a constant.
    [[nodiscard]] double base_point() const noexcept { return base_point_; }
    [[nodiscard]] const HarmonicFunction& h() const noexcept { return h_; }

    /// Row-major values u(x_grid[i], s_grid[k]) with rows indexed by s.
    [[nodiscard]] std::vector<double> sample(std::span<const double> s_grid,
                                             std::span<const double> x_grid) const;

private:
    [[nodiscard]] double spatial(double W) const;

    std::vector<Atom> atoms_;
    HarmonicFunction h_;
    double base_point_ = 0.0;
    double base_offset_ = 0.0;
};

PerformanceSurface performance_surface(const RecoveredMeasure& measure,
                                       MassNormalization normalization = MassNormalization::UnitTotalMass);

struct ForwardOptions {
    double fourier_half_width = 40.0;
    int fourier_points = 1025;
    RecoveryOptions recovery;
    numerics::QuadratureSpec quadrature;
    MassNormalization performance_normalization = MassNormalization::UnitTotalMass;
};

struct ForwardSolution {
    double x0 = 0.0;
    double T = 0.0;
    double A_T = 0.0;
    double budget = 0.0;
    FourierConvention convention = FourierConvention::Canonical;
    std::vector<double> grid;
    std::vector<std::complex<double>> phi;
    RecoveredMeasure canonical;  ///< from phi, int nu/y = 1
    RecoveredMeasure measure;    ///< budget-normalized, int e^{-A_T y} nu(dy)/y = x0
    HarmonicFunction h;          ///< policies: h(-A_T, 0) = x0
    std::function<double(double)> initial_datum;
    PerformanceSurface performance;
};

/// Full flexible-horizon pipeline. Inadmissible results (including mass on y <= 0)
/// raise Inadmissible with a diagnostic; no policy is built for them.
ForwardSolution solve_forward(const TargetDistribution& dist, const MarketCurves& curves, double T,
                              double x0, const ForwardOptions& options = {});

/// Diagnostic attached to Inadmissible errors.
std::string inadmissibility_diagnostic(const std::string& cause);

}  // namespace wealthdist
