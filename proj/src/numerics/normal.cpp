#include "wealthdist/numerics/normal.hpp"

#include "wealthdist/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>

namespace wealthdist::numerics {

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidParameter, "probability outside [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace wealthdist::numerics
