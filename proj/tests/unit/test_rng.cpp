#include "wealthdist/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using wealthdist::rng::Philox4x32;

TEST_CASE("Philox4x32-10 reproduces the Random123 known-answer vectors") {
    const Philox4x32 zero(Philox4x32::Key{0u, 0u});
    const auto a = zero(Philox4x32::Counter{0u, 0u, 0u, 0u});
    CHECK(a == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    const Philox4x32 ones(Philox4x32::Key{0xffffffffu, 0xffffffffu});
    const auto b = ones(Philox4x32::Counter{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(b == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("Philox output is a pure function of key and counter") {
    constexpr Philox4x32 g(12345u);
    constexpr auto first = g.block(3, 7);
    static_assert(first == g.block(3, 7));
    CHECK(g.block(3, 8) != first);
    CHECK(g.block(4, 7) != first);
    CHECK(Philox4x32(12346u).block(3, 7) != first);
}

TEST_CASE("uniforms lie strictly inside (0, 1) and normals have unit variance") {
    CHECK(wealthdist::rng::to_unit(0u, 0u) > 0.0);
    CHECK(wealthdist::rng::to_unit(0xffffffffu, 0xffffffffu) < 1.0);

    const Philox4x32 g(2024u);
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    double s4 = 0.0;
    for (int i = 0; i < n / 2; ++i) {
        const auto [z1, z2] = wealthdist::rng::normal_pair(g.block(0, static_cast<std::uint64_t>(i)));
        for (double z : {z1, z2}) {
            s1 += z;
            s2 += z * z;
            s4 += z * z * z * z;
        }
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}
