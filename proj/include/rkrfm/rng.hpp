#pragma once

#include <array>
#include <cstdint>

namespace rkrfm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: every draw is a pure function of (key, counter), so a parameter
/// can be regenerated from its coordinates without replaying a stream.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit constexpr Philox4x32(Key key) : key_(key) {}
    explicit constexpr Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Counter operator()(Counter ctr) const;

    /// Uniform double in the open interval (0, 1) with 53 random bits.
    double uniform01(Counter ctr) const;

    /// Uniform double in the open interval (lo, hi).
    double uniform(Counter ctr, double lo, double hi) const {
        return lo + (hi - lo) * uniform01(ctr);
    }

private:
    Key key_;
};

/// Stream tags used in the first counter word when drawing outside the basis.
enum class RngPurpose : std::uint32_t {
    CellCenters = 0xC0000001u,
};

}  // namespace rkrfm
