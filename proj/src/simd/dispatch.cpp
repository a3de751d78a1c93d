#include "wealthdist/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace wealthdist::simd {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::dot, &scalar::exp_affine, &scalar::exp_sum};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::dot, &avx2::exp_affine, &avx2::exp_sum};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeon{Isa::Neon, &neon::dot, &neon::exp_affine, &neon::exp_sum};
#endif

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("WEALTHDIST_SIMD")) {
        const std::string want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == to_string(isa) && supported(isa)) return kernels_for(isa);
        }
    }
    if (supported(Isa::Avx2)) return kernels_for(Isa::Avx2);
    if (supported(Isa::Neon)) return kernels_for(Isa::Neon);
    return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "scalar";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!supported(isa)) {
        throw std::invalid_argument("instruction set not available: " + std::string(to_string(isa)));
    }
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    return active().dot(a.data(), b.data(), a.size());
}

void exp_affine(std::span<const double> x, double scale, double shift, std::span<double> out) {
    if (out.size() < x.size()) throw std::invalid_argument("exp_affine: output too short");
    active().exp_affine(x.data(), x.size(), scale, shift, out.data());
}

void exp_sum(std::span<const double> x, std::span<const double> weight,
             std::span<const double> rate, std::span<const double> offset,
             std::span<double> value, std::span<double> derivative) {
    if (weight.size() != rate.size() || weight.size() != offset.size()) {
        throw std::invalid_argument("exp_sum: term arrays differ in length");
    }
    if (value.size() < x.size() || (!derivative.empty() && derivative.size() < x.size())) {
        throw std::invalid_argument("exp_sum: output too short");
    }
    active().exp_sum(x.data(), x.size(), weight.data(), rate.data(), offset.data(), weight.size(),
                     value.data(), derivative.empty() ? nullptr : derivative.data());
}

}  // namespace wealthdist::simd
