#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rkrfm/multi_index.hpp"

namespace rkrfm {

/// A scalar field and all its spatial partial derivatives up to a fixed order,
/// sampled at a set of points. Storage is [multi-index][point].
///
/// Arithmetic is closed at the jet's order; products use the Leibniz rule, so a
/// product of two order-r jets is exact at order r.
class Jet {
public:
    Jet() = default;
    Jet(std::size_t points, int order);

    std::size_t points() const { return npts_; }
    int order() const { return order_; }
    int entries() const { return midx_count(order_); }

    std::span<double> operator[](MultiIndex a);
    std::span<const double> operator[](MultiIndex a) const;
    std::span<double> at(int position);
    std::span<const double> at(int position) const;
    std::span<double> values() { return at(0); }
    std::span<const double> values() const { return at(0); }
    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    /// Copy restricted to total order <= r.
    Jet truncated(int r) const;
    /// Copy restricted to points [first, first+count).
    Jet slice(std::size_t first, std::size_t count) const;
    /// The jet of d^a f, of order order() - |a|.
    Jet shifted(MultiIndex a) const;
    Jet laplacian() const;

    /// this += s * other, over this jet's order (other may carry a higher order).
    Jet& add_scaled(const Jet& other, double s);
    Jet& operator+=(const Jet& other) { return add_scaled(other, 1.0); }
    Jet& operator-=(const Jet& other) { return add_scaled(other, -1.0); }
    Jet& operator*=(double s);
    /// Adds a spatially constant value (only the value entry changes).
    Jet& add_constant(double c);
    /// this += s * (a * b) via the Leibniz rule at this jet's order.
    Jet& add_product(const Jet& a, const Jet& b, double s = 1.0);

    bool all_finite() const;
    bool is_zero() const;

private:
    std::size_t npts_ = 0;
    int order_ = 0;
    std::vector<double> data_;
};

/// Pointwise product at order min(a.order(), b.order()).
Jet multiply(const Jet& a, const Jet& b);
Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(double s, Jet a);

}  // namespace rkrfm
