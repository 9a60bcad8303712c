#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rkrfm/basis.hpp"
#include "rkrfm/error.hpp"

using namespace rkrfm;

namespace {

constexpr double kPi = std::numbers::pi;

Partition two_pi_3x3() { return build_partition({{0, 0}, {2 * kPi, 2 * kPi}}, 3, 3); }

FeatureBasis single_feature(Activation act, double wx, double wy, double b) {
    Partition p = build_partition({{0, 0}, {2, 4}}, 1, 1);
    return FeatureBasis(p, act, {{FeatureParams{{wx}, {wy}, {b}}}});
}

// Independent scalar model of one feature: sigma(W . (x - c)/r + b).
double feature_value(Activation act, const FeatureParams& p, int j, const Subdomain& s, Vec2 x) {
    const double u = p.wx[j] * (x.x - s.center.x) / s.radius.x + p.wy[j] * (x.y - s.center.y) / s.radius.y + p.b[j];
    return act == Activation::Tanh ? std::tanh(u) : std::cos(u);
}

}  // namespace

TEST(SampleBasis, BoundsAndShape) {
    for (double bound : {1.7, 5.0}) {
        const FeatureBasis b = sample_basis(two_pi_3x3(), 200, bound, Activation::Tanh, 42);
        EXPECT_EQ(b.features(), 200);
        for (int n = 0; n < 9; ++n) {
            const auto& p = b.params(n);
            ASSERT_EQ(p.wx.size(), 200u);
            for (int j = 0; j < 200; ++j) {
                for (double v : {p.wx[j], p.wy[j], p.b[j]}) {
                    EXPECT_GT(v, -bound);
                    EXPECT_LT(v, bound);
                }
            }
        }
    }
}

TEST(SampleBasis, DeterministicAndKeyed) {
    const FeatureBasis a = sample_basis(two_pi_3x3(), 50, 1.7, Activation::Cos, 7, 3);
    const FeatureBasis b = sample_basis(two_pi_3x3(), 50, 1.7, Activation::Cos, 7, 3);
    const FeatureBasis c = sample_basis(two_pi_3x3(), 50, 1.7, Activation::Cos, 7, 4);
    const FeatureBasis d = sample_basis(two_pi_3x3(), 50, 1.7, Activation::Cos, 8, 3);
    for (int n = 0; n < 9; ++n) {
        EXPECT_EQ(a.params(n).wx, b.params(n).wx);
        EXPECT_EQ(a.params(n).wy, b.params(n).wy);
        EXPECT_EQ(a.params(n).b, b.params(n).b);
        EXPECT_NE(a.params(n).wx, c.params(n).wx);
        EXPECT_NE(a.params(n).b, d.params(n).b);
    }
    // A larger basis extends a smaller one: parameters depend on (seed, step, n, j) only.
    const FeatureBasis e = sample_basis(two_pi_3x3(), 80, 1.7, Activation::Cos, 7, 3);
    for (int j = 0; j < 50; ++j) EXPECT_EQ(e.params(2).wx[j], a.params(2).wx[j]);
}

TEST(SampleBasis, PerComponentSets) {
    const FeatureBasis b = sample_basis(two_pi_3x3(), 20, 1.0, Activation::Tanh, 1, 0, 3);
    EXPECT_EQ(b.parameter_sets(), 3);
    EXPECT_NE(b.params(0, 0).wx, b.params(0, 1).wx);
    EXPECT_EQ(b.set_for_component(2), 2);
}

TEST(SampleBasis, RejectsBadInput) {
    EXPECT_THROW(sample_basis(two_pi_3x3(), 0, 1.0, Activation::Tanh, 1), ConfigError);
    EXPECT_THROW(sample_basis(two_pi_3x3(), 10, 0.0, Activation::Tanh, 1), ConfigError);
    EXPECT_THROW(parse_activation("relu"), ConfigError);
}

TEST(EvalFeature, ClosedForms) {
    const FeatureBasis zero = single_feature(Activation::Tanh, 0, 0, 0);
    EXPECT_EQ(eval_feature(zero, 0, 0, {0.3, 1.7}, kValue), 0.0);

    const FeatureBasis c = single_feature(Activation::Cos, 0.8, -1.3, 0.4);
    const Subdomain& s = c.partition().subdomain(0);
    const Vec2 x{0.5, 3.1};
    const double u = 0.8 * (x.x - s.center.x) / s.radius.x - 1.3 * (x.y - s.center.y) / s.radius.y + 0.4;
    EXPECT_NEAR(eval_feature(c, 0, 0, x, kDxx), -std::pow(0.8 / s.radius.x, 2) * std::cos(u), 1e-15);
    EXPECT_THROW(eval_feature(c, 0, 0, x, {3, 2}), ConfigError);
}

TEST(EvalFeature, TanhFirstDerivativeMatchesDifferences) {
    const FeatureBasis b = sample_basis(two_pi_3x3(), 30, 1.7, Activation::Tanh, 99);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 x{u(gen), u(gen)};
        const int n = b.partition().locate(x);
        const int j = static_cast<int>(gen() % 30);
        const Subdomain& s = b.partition().subdomain(n);
        // Step of 1e-5 in normalized coordinates.
        const double hx = h * s.radius.x;
        const double fd = (feature_value(Activation::Tanh, b.params(n), j, s, {x.x + hx, x.y}) -
                           feature_value(Activation::Tanh, b.params(n), j, s, {x.x - hx, x.y})) /
                          (2 * hx);
        const double an = eval_feature(b, n, j, x, kDx);
        EXPECT_NEAR(an, fd, 1e-6 * std::max(std::abs(fd), std::abs(b.params(n).wx[j] / s.radius.x)));
    }
}

TEST(EvalFeature, DerivativeIdentities) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const double v = u(gen);
        const double t = activation_derivative(Activation::Tanh, 0, v);
        EXPECT_NEAR(activation_derivative(Activation::Tanh, 1, v), 1 - t * t, 1e-14);
    }
    const FeatureBasis c = sample_basis(two_pi_3x3(), 40, 1.7, Activation::Cos, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec2 x{std::abs(u(gen)) * 1.5, std::abs(u(gen)) * 1.5};
        const int n = c.partition().locate(x);
        const int j = static_cast<int>(gen() % 40);
        const double f = c.partition().subdomain(n).radius.x;
        const double phi = eval_feature(c, n, j, x, kValue);
        const double d4 = eval_feature(c, n, j, x, {4, 0});
        const double k4 = std::pow(c.params(n).wx[j] / f, 4);
        EXPECT_NEAR(d4, k4 * phi, 1e-12 * std::max(std::abs(k4 * phi), 1e-300) + 1e-300);
    }
}

TEST(DesignBlock, ShapesAndConsistency) {
    const FeatureBasis b = sample_basis(two_pi_3x3(), 200, 1.7, Activation::Tanh, 3);
    const CollocationSet c = build_collocation(b.partition(), 20, 20);
    PointSet own;
    for (int i = 0; i < 400; ++i) own.push_back(c.points().at(c.offset(4) + i));
    const Eigen::MatrixXd A4 = eval_design_block(b, 4, own, kValue);
    EXPECT_EQ(A4.rows(), 400);
    EXPECT_EQ(A4.cols(), 200);
    for (int q : {0, 17, 399})
        for (int j : {0, 99, 199}) EXPECT_NEAR(A4(q, j), eval_feature(b, 4, j, own.at(q), kValue), 1e-15);

    PointSet one;
    one.push_back(b.partition().subdomain(0).center);
    const FeatureBasis b1 = sample_basis(b.partition(), 1, 1.7, Activation::Tanh, 3);
    EXPECT_EQ(eval_design_block(b1, 0, one, kValue)(0, 0), eval_feature(b1, 0, 0, one.at(0), kValue));

    PointSet top;
    for (auto i : c.edge(0, Side::Top)) top.push_back(c.points().at(i));
    const Eigen::MatrixXd Dy = eval_design_block(b, 0, top, kDy);
    EXPECT_NEAR(Dy(3, 5), eval_feature(b, 0, 5, top.at(3), kDy), 1e-14);

    EXPECT_THROW(eval_design_block(b, 0, own, kValue), ConfigError);
}
