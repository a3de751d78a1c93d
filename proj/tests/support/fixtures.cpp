#include "fixtures.hpp"

#include "wealthdist/numerics/normal.hpp"

namespace wealthdist::testing {

std::vector<double> lognormal_markers(int N, double s) {
    std::vector<double> out;
    for (int i = 1; i <= N; ++i) {
        out.push_back(std::exp(s * numerics::normal_quantile((2.0 * i - 1.0) / (2.0 * N))));
    }
    return out;
}

}  // namespace wealthdist::testing
