#pragma once

#include <array>
#include <cstddef>

namespace rkrfm {

/// Highest total derivative order carried by bases and jets.
///
/// Equals m*p for the second-order-in-space cell model advanced by a two-stage
/// explicit Runge-Kutta method. Raising the RK order for m = 2 models requires
/// raising this constant (all tables below are sized from it).
inline constexpr int kMaxDerivativeOrder = 4;

/// Partial derivative orders (d/dx)^ax (d/dy)^ay.
struct MultiIndex {
    int ax = 0;
    int ay = 0;

    constexpr int order() const { return ax + ay; }
    constexpr bool operator==(const MultiIndex&) const = default;
};

/// Number of multi-indices with total order <= r.
constexpr int midx_count(int r) { return (r + 1) * (r + 2) / 2; }

/// Position of a multi-index in the graded ordering
/// (0,0); (1,0),(0,1); (2,0),(1,1),(0,2); ...
constexpr int midx_position(MultiIndex a) {
    const int k = a.order();
    return k * (k + 1) / 2 + a.ay;
}

inline constexpr int kMaxMidx = midx_count(kMaxDerivativeOrder);

/// Inverse of midx_position for all multi-indices up to the order cap.
inline constexpr std::array<MultiIndex, kMaxMidx> kMidxTable = [] {
    std::array<MultiIndex, kMaxMidx> t{};
    for (int k = 0; k <= kMaxDerivativeOrder; ++k)
        for (int ay = 0; ay <= k; ++ay) t[midx_position({k - ay, ay})] = {k - ay, ay};
    return t;
}();

constexpr MultiIndex midx_at(int position) { return kMidxTable[position]; }

constexpr bool midx_valid(MultiIndex a) {
    return a.ax >= 0 && a.ay >= 0 && a.order() <= kMaxDerivativeOrder;
}

inline constexpr MultiIndex kValue{0, 0};
inline constexpr MultiIndex kDx{1, 0};
inline constexpr MultiIndex kDy{0, 1};
inline constexpr MultiIndex kDxx{2, 0};
inline constexpr MultiIndex kDyy{0, 2};

/// Binomial coefficients up to the order cap.
inline constexpr std::array<std::array<double, kMaxDerivativeOrder + 1>, kMaxDerivativeOrder + 1>
    kBinomial = [] {
        std::array<std::array<double, kMaxDerivativeOrder + 1>, kMaxDerivativeOrder + 1> c{};
        for (int n = 0; n <= kMaxDerivativeOrder; ++n) {
            c[n][0] = 1.0;
            for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
        }
        return c;
    }();

}  // namespace rkrfm
