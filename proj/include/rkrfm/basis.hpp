#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rkrfm/geometry.hpp"
#include "rkrfm/multi_index.hpp"

namespace rkrfm {

enum class Activation { Tanh, Cos };

Activation parse_activation(const std::string& name);
const char* activation_name(Activation a);

/// Weights and biases of the J features on one subdomain (normalized coordinates).
struct FeatureParams {
    std::vector<double> wx;
    std::vector<double> wy;
    std::vector<double> b;
};

/// Activation derivatives of all J features of one subdomain at a batch of points.
///
/// sigma[k](q, j) = sigma^{(k)}(W_j . x~_q + b_j); the physical derivative
/// d^a phi_j = sigma[|a|](q, j) * fx_j^ax * fy_j^ay with f = W / r.
struct FeatureDerivatives {
    int order = 0;
    std::vector<Eigen::MatrixXd> sigma;
    Eigen::ArrayXd fx;
    Eigen::ArrayXd fy;

    /// Chain-rule factor per feature for multi-index a.
    Eigen::ArrayXd factor(MultiIndex a) const;
    /// The |points| x J design block for multi-index a.
    Eigen::MatrixXd block(MultiIndex a) const;
};

/// Random feature functions sigma(W . x~ + b) on every subdomain of a partition.
///
/// Parameters are pure functions of (seed, step, subdomain, feature, slot), so
/// rebuilding a basis with the same inputs reproduces it bitwise. With more than
/// one parameter set, set s supplies the features of field component s.
class FeatureBasis {
public:
    FeatureBasis(Partition partition, int features, double bound, Activation activation, std::uint64_t seed,
                 std::uint64_t step = 0, int parameter_sets = 1);
    /// Basis with explicit parameters, params[set][subdomain]; the bound is their max magnitude.
    FeatureBasis(Partition partition, Activation activation, std::vector<std::vector<FeatureParams>> params);

    const Partition& partition() const { return partition_; }
    int features() const { return J_; }
    double bound() const { return bound_; }
    Activation activation() const { return activation_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t step() const { return step_; }
    int parameter_sets() const { return static_cast<int>(params_.size()); }
    /// Parameter set used for field component c.
    int set_for_component(int c) const { return parameter_sets() == 1 ? 0 : c; }

    const FeatureParams& params(int n, int set = 0) const;

    double eval_feature(int n, int j, Vec2 point, MultiIndex a, int set = 0) const;
    /// |points| x J block; every point must lie in the closed box of subdomain n.
    Eigen::MatrixXd eval_design_block(int n, const PointSet& points, MultiIndex a, int set = 0) const;
    /// Activation derivatives up to `order` at the given coordinates (no ownership check).
    FeatureDerivatives derivatives(int n, std::span<const double> x, std::span<const double> y, int order,
                                   int set = 0) const;

private:
    Partition partition_;
    int J_;
    double bound_;
    Activation activation_;
    std::uint64_t seed_;
    std::uint64_t step_;
    std::vector<std::vector<FeatureParams>> params_;  // [set][subdomain]
};

FeatureBasis sample_basis(const Partition& partition, int features, double bound, Activation activation,
                          std::uint64_t seed, std::uint64_t step = 0, int parameter_sets = 1);

/// k-th derivative of the scalar activation at u (k <= kMaxDerivativeOrder).
double activation_derivative(Activation a, int k, double u);

double eval_feature(const FeatureBasis& basis, int n, int j, Vec2 point, MultiIndex a);
Eigen::MatrixXd eval_design_block(const FeatureBasis& basis, int n, const PointSet& points, MultiIndex a);

}  // namespace rkrfm
