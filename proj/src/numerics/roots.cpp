#include "wealthdist/numerics/roots.hpp"

#include "wealthdist/error.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace wealthdist::numerics {

double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iter) {
    if (lo > hi) std::swap(lo, hi);
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) {
        fail(ErrorCode::NonFiniteIntegrand, "root function not finite at bracket ends");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream os;
        os << "no sign change on [" << lo << ", " << hi << "]: f=" << flo << ", " << fhi;
        fail(ErrorCode::NoSignChange, os.str());
    }
    const double eps = std::numeric_limits<double>::epsilon();
    auto done = [tol, eps](double a, double b) {
        return std::abs(b - a) <= std::max(tol, 4.0 * eps * std::max(std::abs(a), std::abs(b)));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    std::pair<double, double> r;
    try {
        r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    } catch (const boost::math::evaluation_error& e) {
        fail(ErrorCode::MaxIterations, e.what());
    }
    if (iters >= static_cast<std::uintmax_t>(max_iter) && !done(r.first, r.second)) {
        fail(ErrorCode::MaxIterations, "root finder did not converge");
    }
    if (r.first == r.second) return r.first;
    return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

double monotone_inverse(const std::function<double(double)>& f, double y, double lo, double hi,
                        double tol) {
    const double flo = f(lo);
    const double fhi = f(hi);
    const double slack = tol * std::max(1.0, std::abs(y));
    if (y < flo - slack || y > fhi + slack) {
        std::ostringstream os;
        os << "value " << y << " outside image [" << flo << ", " << fhi << "]";
        fail(ErrorCode::OutOfRange, os.str());
    }
    if (y <= flo) return lo;
    if (y >= fhi) return hi;
    return bracketed_root([&](double x) { return f(x) - y; }, lo, hi, 0.0, 400);
}

double monotone_inverse_unbounded(const std::function<double(double)>& f, double y, double guess,
                                  double step, double tol, int max_expansions) {
    double lo = guess - step;
    double hi = guess + step;
    double width = step;
    for (int i = 0; i < max_expansions; ++i) {
        const double flo = f(lo);
        const double fhi = f(hi);
        if (flo <= y && y <= fhi) return monotone_inverse(f, y, lo, hi, tol);
        width *= 2.0;
        if (flo > y) {
            hi = lo;
            lo -= width;
        } else {
            lo = hi;
            hi += width;
        }
    }
    fail(ErrorCode::OutOfRange, "could not bracket the inverse");
}

}  // namespace wealthdist::numerics
