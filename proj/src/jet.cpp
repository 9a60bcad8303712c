#include "rkrfm/jet.hpp"

#include <algorithm>
#include <cmath>

#include "rkrfm/error.hpp"
#include "rkrfm/simd/dispatch.hpp"

namespace rkrfm {

Jet::Jet(std::size_t points, int order) : npts_(points), order_(order) {
    if (order < 0 || order > kMaxDerivativeOrder) throw ConfigError("jet order out of range");
    data_.assign(static_cast<std::size_t>(midx_count(order)) * points, 0.0);
}

std::span<double> Jet::at(int position) {
    return {data_.data() + static_cast<std::size_t>(position) * npts_, npts_};
}

std::span<const double> Jet::at(int position) const {
    return {data_.data() + static_cast<std::size_t>(position) * npts_, npts_};
}

std::span<double> Jet::operator[](MultiIndex a) {
    if (a.order() > order_) throw ConfigError("jet does not carry the requested derivative");
    return at(midx_position(a));
}

std::span<const double> Jet::operator[](MultiIndex a) const {
    if (a.order() > order_) throw ConfigError("jet does not carry the requested derivative");
    return at(midx_position(a));
}

Jet Jet::truncated(int r) const {
    if (r > order_) throw ConfigError("cannot raise the order of a jet by truncation");
    Jet out(npts_, r);
    std::copy_n(data_.begin(), out.data_.size(), out.data_.begin());
    return out;
}

Jet Jet::slice(std::size_t first, std::size_t count) const {
    if (first + count > npts_) throw ConfigError("jet slice out of range");
    Jet out(count, order_);
    for (int p = 0; p < entries(); ++p) {
        auto src = at(p).subspan(first, count);
        std::copy(src.begin(), src.end(), out.at(p).begin());
    }
    return out;
}

Jet Jet::shifted(MultiIndex a) const {
    if (a.order() > order_) throw ConfigError("cannot shift a jet past its order");
    Jet out(npts_, order_ - a.order());
    for (int p = 0; p < out.entries(); ++p) {
        const MultiIndex b = midx_at(p);
        auto src = at(midx_position({b.ax + a.ax, b.ay + a.ay}));
        std::copy(src.begin(), src.end(), out.at(p).begin());
    }
    return out;
}

Jet Jet::laplacian() const {
    Jet out = shifted(kDxx);
    out += shifted(kDyy);
    return out;
}

Jet& Jet::add_scaled(const Jet& other, double s) {
    if (other.npts_ != npts_) throw ConfigError("jet point counts differ");
    if (other.order_ < order_) throw ConfigError("jet of lower order cannot update a higher-order jet");
    simd::kernels().axpy(data_.size(), s, other.data_.data(), data_.data());
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Jet& Jet::add_constant(double c) {
    for (double& v : values()) v += c;
    return *this;
}

Jet& Jet::add_product(const Jet& a, const Jet& b, double s) {
    if (a.npts_ != npts_ || b.npts_ != npts_) throw ConfigError("jet point counts differ");
    if (a.order_ < order_ || b.order_ < order_) throw ConfigError("jet product operands below the target order");
    const auto& kern = simd::kernels();
    for (int p = 0; p < entries(); ++p) {
        const MultiIndex al = midx_at(p);
        for (int bx = 0; bx <= al.ax; ++bx) {
            for (int by = 0; by <= al.ay; ++by) {
                const double c = s * kBinomial[al.ax][bx] * kBinomial[al.ay][by];
                kern.mul_acc(npts_, c, a.at(midx_position({bx, by})).data(),
                             b.at(midx_position({al.ax - bx, al.ay - by})).data(), at(p).data());
            }
        }
    }
    return *this;
}

bool Jet::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool Jet::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

Jet multiply(const Jet& a, const Jet& b) {
    Jet out(a.points(), std::min(a.order(), b.order()));
    out.add_product(a, b);
    return out;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(double s, Jet a) { return a *= s; }

}  // namespace rkrfm
