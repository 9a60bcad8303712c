#include "rkrfm/basis.hpp"

#include <algorithm>
#include <cmath>

#include "rkrfm/error.hpp"
#include "rkrfm/rng.hpp"
#include "rkrfm/simd/dispatch.hpp"

namespace rkrfm {

namespace {

enum Slot : std::uint32_t { kSlotWx = 0, kSlotWy = 1, kSlotB = 2 };

void check_order(MultiIndex a) {
    if (!midx_valid(a))
        throw ConfigError("derivative order (" + std::to_string(a.ax) + "," + std::to_string(a.ay) +
                          ") exceeds the supported cap " + std::to_string(kMaxDerivativeOrder));
}

}  // namespace

Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "cos") return Activation::Cos;
    throw ConfigError("unknown activation '" + name + "' (expected tanh or cos)");
}

const char* activation_name(Activation a) { return a == Activation::Tanh ? "tanh" : "cos"; }

double activation_derivative(Activation a, int k, double u) {
    if (k < 0 || k > kMaxDerivativeOrder) throw ConfigError("activation derivative order out of range");
    double out[kMaxDerivativeOrder + 1];
    const auto& kern = simd::kernels(simd::Isa::Scalar);
    if (a == Activation::Tanh)
        kern.tanh_derivs(1, k, &u, out);
    else
        kern.cos_derivs(1, k, &u, out);
    return out[k];
}

Eigen::ArrayXd FeatureDerivatives::factor(MultiIndex a) const {
    return fx.pow(a.ax) * fy.pow(a.ay);
}

Eigen::MatrixXd FeatureDerivatives::block(MultiIndex a) const {
    check_order(a);
    if (a.order() > order) throw ConfigError("requested derivative beyond evaluated order");
    if (a.order() == 0) return sigma[0];
    return sigma[a.order()] * factor(a).matrix().asDiagonal();
}

FeatureBasis::FeatureBasis(Partition partition, int features, double bound, Activation activation,
                           std::uint64_t seed, std::uint64_t step, int parameter_sets)
    : partition_(std::move(partition)),
      J_(features),
      bound_(bound),
      activation_(activation),
      seed_(seed),
      step_(step) {
    if (features < 1) throw ConfigError("features per subdomain must be >= 1");
    if (!(bound > 0.0) || !std::isfinite(bound)) throw ConfigError("feature bound R_m must be positive");
    if (parameter_sets < 1 || parameter_sets > 255) throw ConfigError("parameter sets must be in [1, 255]");
    const Philox4x32 rng(seed);
    const auto step32 = static_cast<std::uint32_t>(step);
    params_.resize(static_cast<std::size_t>(parameter_sets));
    for (int s = 0; s < parameter_sets; ++s) {
        auto& sets = params_[s];
        sets.resize(static_cast<std::size_t>(partition_.size()));
        for (int n = 0; n < partition_.size(); ++n) {
            FeatureParams& p = sets[n];
            p.wx.resize(J_);
            p.wy.resize(J_);
            p.b.resize(J_);
            for (int j = 0; j < J_; ++j) {
                const auto ctr = [&](std::uint32_t slot) {
                    return Philox4x32::Counter{step32, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(j),
                                               slot | (static_cast<std::uint32_t>(s) << 8)};
                };
                p.wx[j] = rng.uniform(ctr(kSlotWx), -bound, bound);
                p.wy[j] = rng.uniform(ctr(kSlotWy), -bound, bound);
                p.b[j] = rng.uniform(ctr(kSlotB), -bound, bound);
            }
        }
    }
}

FeatureBasis::FeatureBasis(Partition partition, Activation activation,
                           std::vector<std::vector<FeatureParams>> params)
    : partition_(std::move(partition)),
      J_(0),
      bound_(0.0),
      activation_(activation),
      seed_(0),
      step_(0),
      params_(std::move(params)) {
    if (params_.empty() || params_.front().empty()) throw ConfigError("explicit basis needs parameters");
    J_ = static_cast<int>(params_.front().front().wx.size());
    if (J_ < 1) throw ConfigError("features per subdomain must be >= 1");
    for (const auto& set : params_) {
        if (static_cast<int>(set.size()) != partition_.size())
            throw ConfigError("explicit basis needs one parameter block per subdomain");
        for (const auto& p : set) {
            if (static_cast<int>(p.wx.size()) != J_ || static_cast<int>(p.wy.size()) != J_ ||
                static_cast<int>(p.b.size()) != J_)
                throw ConfigError("explicit basis parameter blocks differ in size");
            for (int j = 0; j < J_; ++j)
                bound_ = std::max({bound_, std::abs(p.wx[j]), std::abs(p.wy[j]), std::abs(p.b[j])});
        }
    }
}

const FeatureParams& FeatureBasis::params(int n, int set) const {
    return params_.at(static_cast<std::size_t>(set)).at(static_cast<std::size_t>(n));
}

double FeatureBasis::eval_feature(int n, int j, Vec2 point, MultiIndex a, int set) const {
    check_order(a);
    if (j < 0 || j >= J_) throw ConfigError("feature index out of range");
    const FeatureParams& p = params(n, set);
    const Subdomain& s = partition_.subdomain(n);
    const Vec2 q = normalize(point, s);
    const double u = p.wx[j] * q.x + p.wy[j] * q.y + p.b[j];
    return activation_derivative(activation_, a.order(), u) * std::pow(p.wx[j] / s.radius.x, a.ax) *
           std::pow(p.wy[j] / s.radius.y, a.ay);
}

FeatureDerivatives FeatureBasis::derivatives(int n, std::span<const double> x, std::span<const double> y, int order,
                                             int set) const {
    if (order < 0 || order > kMaxDerivativeOrder) throw ConfigError("derivative order out of range");
    if (x.size() != y.size()) throw ConfigError("coordinate arrays differ in length");
    const FeatureParams& p = params(n, set);
    const Subdomain& s = partition_.subdomain(n);
    const std::size_t npts = x.size();
    const auto& kern = simd::kernels();

    std::vector<double> xn(npts), yn(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        xn[i] = (x[i] - s.center.x) / s.radius.x;
        yn[i] = (y[i] - s.center.y) / s.radius.y;
    }
    Eigen::MatrixXd u(static_cast<Eigen::Index>(npts), J_);
    for (int j = 0; j < J_; ++j) kern.affine(npts, p.wx[j], p.wy[j], p.b[j], xn.data(), yn.data(), u.col(j).data());

    // One kernel call over the whole column-major block: plane k of the output
    // is exactly the column-major matrix sigma^{(k)}.
    const std::size_t total = npts * static_cast<std::size_t>(J_);
    std::vector<double> planes(total * static_cast<std::size_t>(order + 1));
    if (activation_ == Activation::Tanh)
        kern.tanh_derivs(total, order, u.data(), planes.data());
    else
        kern.cos_derivs(total, order, u.data(), planes.data());

    FeatureDerivatives d;
    d.order = order;
    d.sigma.reserve(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k)
        d.sigma.emplace_back(Eigen::Map<const Eigen::MatrixXd>(planes.data() + k * total,
                                                              static_cast<Eigen::Index>(npts), J_));
    d.fx = Eigen::Map<const Eigen::ArrayXd>(p.wx.data(), J_) / s.radius.x;
    d.fy = Eigen::Map<const Eigen::ArrayXd>(p.wy.data(), J_) / s.radius.y;
    return d;
}

Eigen::MatrixXd FeatureBasis::eval_design_block(int n, const PointSet& points, MultiIndex a, int set) const {
    check_order(a);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!partition_.in_closed_subdomain(n, points.at(i)))
            throw ConfigError("point " + std::to_string(i) + " does not belong to subdomain " + std::to_string(n));
    }
    return derivatives(n, points.x, points.y, a.order(), set).block(a);
}

FeatureBasis sample_basis(const Partition& partition, int features, double bound, Activation activation,
                          std::uint64_t seed, std::uint64_t step, int parameter_sets) {
    return FeatureBasis(partition, features, bound, activation, seed, step, parameter_sets);
}

double eval_feature(const FeatureBasis& basis, int n, int j, Vec2 point, MultiIndex a) {
    return basis.eval_feature(n, j, point, a);
}

Eigen::MatrixXd eval_design_block(const FeatureBasis& basis, int n, const PointSet& points, MultiIndex a) {
    return basis.eval_design_block(n, points, a);
}

}  // namespace rkrfm
