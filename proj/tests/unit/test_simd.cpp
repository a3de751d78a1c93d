#include "wealthdist/simd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string_view>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

using namespace wealthdist::simd;

namespace {

std::vector<Isa> available() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::Avx2, Isa::Neon}) {
        if (supported(isa)) out.push_back(isa);
    }
    return out;
}

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

double rel(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("scalar kernels are always available and the active table is one of the known sets") {
    CHECK(supported(Isa::Scalar));
    const Isa active_isa = active().isa;
    CHECK(supported(active_isa));
    const Isa missing = supported(Isa::Neon) ? Isa::Avx2 : Isa::Neon;
    if (!supported(missing)) CHECK_THROWS_AS((void)kernels_for(missing), std::invalid_argument);
}

TEST_CASE("vector dot matches the scalar reference for every tail length") {
    for (Isa isa : available()) {
        const auto& k = kernels_for(isa);
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 15u, 16u, 17u, 33u, 1000u}) {
            const auto a = uniform(n, -2.0, 2.0, 1 + n);
            const auto b = uniform(n, -2.0, 2.0, 7 + n);
            const double ref = scalar::dot(a.data(), b.data(), n);
            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
            CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref) <= 1e-14 * (1.0 + mag));
        }
    }
}

TEST_CASE("vector exp agrees with std::exp to a few ulps across the full range") {
    for (Isa isa : available()) {
        const auto& k = kernels_for(isa);
        const auto x = uniform(4099, -700.0, 700.0, 42);
        std::vector<double> out(x.size());
        k.exp_affine(x.data(), x.size(), 1.0, 0.0, out.data());
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, rel(out[i], std::exp(x[i])));
        CHECK(worst < 8 * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("vector exp handles overflow, underflow and NaN like std::exp") {
    for (Isa isa : available()) {
        const auto& k = kernels_for(isa);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const std::vector<double> x{800.0, -800.0, nan, 0.0, 709.7, -708.0, 1e-300};
        std::vector<double> out(x.size());
        k.exp_affine(x.data(), x.size(), 1.0, 0.0, out.data());
        CHECK(std::isinf(out[0]));
        CHECK(out[1] == 0.0);
        CHECK(std::isnan(out[2]));
        CHECK(out[3] == 1.0);
        CHECK(rel(out[4], std::exp(709.7)) < 1e-15);
        CHECK(rel(out[5], std::exp(-708.0)) < 1e-15);
        CHECK(out[6] == 1.0);
    }
}

TEST_CASE("vector exp_sum matches the scalar reference with and without derivatives") {
    const std::vector<double> w{0.3, 1.2, 0.05};
    const std::vector<double> rate{0.5, 1.0, 2.5};
    const std::vector<double> off{-0.1, -0.02, -3.0};
    for (Isa isa : available()) {
        const auto& k = kernels_for(isa);
        for (std::size_t n : {1u, 2u, 5u, 8u, 131u}) {
            const auto x = uniform(n, -6.0, 6.0, 99 + n);
            std::vector<double> v0(n), d0(n), v1(n), d1(n), v2(n);
            scalar::exp_sum(x.data(), n, w.data(), rate.data(), off.data(), w.size(), v0.data(), d0.data());
            k.exp_sum(x.data(), n, w.data(), rate.data(), off.data(), w.size(), v1.data(), d1.data());
            k.exp_sum(x.data(), n, w.data(), rate.data(), off.data(), w.size(), v2.data(), nullptr);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(rel(v1[i], v0[i]) < 1e-14);
                CHECK(rel(d1[i], d0[i]) < 1e-14);
                CHECK(v2[i] == v1[i]);
            }
        }
    }
}

TEST_CASE("span wrappers validate lengths") {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    CHECK_THROWS_AS((void)dot(a, b), std::invalid_argument);
    std::vector<double> out(1);
    CHECK_THROWS_AS(exp_affine(a, 1.0, 0.0, out), std::invalid_argument);
    CHECK(dot(a, a) == doctest::Approx(5.0));
}

TEST_CASE("environment override selects the requested kernels") {
    const char* want = std::getenv("WEALTHDIST_SIMD");
    if (want != nullptr && std::string_view(want) == "scalar") CHECK(active().isa == Isa::Scalar);
    if (want == nullptr && supported(Isa::Avx2)) CHECK(active().isa == Isa::Avx2);
}
