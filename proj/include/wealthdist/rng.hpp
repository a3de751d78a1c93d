#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace wealthdist::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// every output block is a pure function of (key, counter), which makes
/// parallel path generation reproducible regardless of scheduling.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit constexpr Philox4x32(Key key) noexcept : key_(key) {}
    explicit constexpr Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    [[nodiscard]] constexpr Counter operator()(Counter ctr) const noexcept {
        Key k = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = step(ctr, k);
            k[0] += kW0;
            k[1] += kW1;
        }
        return ctr;
    }

    /// Block for (stream, index), each a 64-bit integer.
    [[nodiscard]] constexpr Counter block(std::uint64_t stream, std::uint64_t index) const noexcept {
        return (*this)(Counter{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                               static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)});
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static constexpr Counter step(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    Key key_;
};

/// Double in the open interval (0, 1) from the top 52 of 64 random bits.
[[nodiscard]] inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Two independent standard normals from one Philox block (Box-Muller).
[[nodiscard]] inline std::pair<double, double> normal_pair(const Philox4x32::Counter& block) noexcept {
    const double u1 = to_unit(block[0], block[1]);
    const double u2 = to_unit(block[2], block[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace wealthdist::rng
