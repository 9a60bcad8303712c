#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "rkrfm/error.hpp"
#include "rkrfm/geometry.hpp"

using namespace rkrfm;

namespace {

constexpr double kPi = std::numbers::pi;

DomainBox box(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y1}}; }

}  // namespace

TEST(Partition, ThreeByThreeOnTwoPi) {
    const Partition p = build_partition(box(0, 0, 2 * kPi, 2 * kPi), 3, 3);
    ASSERT_EQ(p.size(), 9);
    for (int n = 0; n < 9; ++n) {
        EXPECT_NEAR(p.subdomain(n).radius.x, kPi / 3, 1e-15);
        EXPECT_NEAR(p.subdomain(n).radius.y, kPi / 3, 1e-15);
    }
}

TEST(Partition, SingleSubdomain) {
    const Partition p = build_partition(box(0, 0, 1, 1), 1, 1);
    ASSERT_EQ(p.size(), 1);
    EXPECT_EQ(p.subdomain(0).center, (Vec2{0.5, 0.5}));
    EXPECT_EQ(p.subdomain(0).radius, (Vec2{0.5, 0.5}));
}

TEST(Partition, UniformSplitAndNumbering) {
    const Partition p = build_partition(box(0, 0, 200, 200), 4, 4);
    EXPECT_EQ(p.subdomain(0).lower, (Vec2{0, 0}));
    EXPECT_EQ(p.subdomain(0).upper, (Vec2{50, 50}));
    // Right neighbour is n + Ny, upper neighbour n + 1.
    EXPECT_EQ(p.neighbor(5, Side::Right).value(), 9);
    EXPECT_EQ(p.neighbor(5, Side::Top).value(), 6);
    EXPECT_FALSE(p.neighbor(0, Side::Left).has_value());
    EXPECT_FALSE(p.neighbor(15, Side::Top).has_value());
}

TEST(Partition, RejectsBadInput) {
    EXPECT_THROW(build_partition(box(0, 0, 1, 1), 0, 2), ConfigError);
    EXPECT_THROW(build_partition(box(0, 0, 1, 1), 2, -1), ConfigError);
    EXPECT_THROW(build_partition(box(0, 0, 0, 1), 1, 1), ConfigError);
    EXPECT_THROW(build_partition(box(1, 0, 0, 1), 1, 1), ConfigError);
}

TEST(Normalize, CenterCornerAndEdge) {
    const Partition p = build_partition(box(0, 0, 200, 200), 4, 4);
    const Subdomain& s = p.subdomain(0);
    EXPECT_EQ(normalize(s.center, s), (Vec2{0, 0}));
    EXPECT_EQ(normalize({s.center.x + s.radius.x, s.center.y + s.radius.y}, s), (Vec2{1, 1}));
    EXPECT_EQ(normalize({25, 50}, s), (Vec2{0, 1}));
    for (int n = 0; n < p.size(); ++n) {
        const Subdomain& t = p.subdomain(n);
        EXPECT_EQ(p.normalize({t.center.x + t.radius.x, t.center.y + t.radius.y}, n), (Vec2{1, 1}));
    }
    Subdomain degenerate = s;
    degenerate.radius = {0.0, 1.0};
    EXPECT_THROW(normalize({0, 0}, degenerate), ConfigError);
}

TEST(Normalize, IsAffineProperty) {
    const Partition p = build_partition(box(-1, 2, 5, 7), 3, 2);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = static_cast<int>(gen() % p.size());
        const Subdomain& s = p.subdomain(n);
        auto draw = [&] {
            return Vec2{s.lower.x + u01(gen) * (s.upper.x - s.lower.x), s.lower.y + u01(gen) * (s.upper.y - s.lower.y)};
        };
        const Vec2 x = draw(), y = draw();
        const double a = u01(gen);
        const Vec2 lhs = normalize({a * x.x + (1 - a) * y.x, a * x.y + (1 - a) * y.y}, s);
        const Vec2 nx = normalize(x, s), ny = normalize(y, s);
        EXPECT_NEAR(lhs.x, a * nx.x + (1 - a) * ny.x, 1e-13);
        EXPECT_NEAR(lhs.y, a * nx.y + (1 - a) * ny.y, 1e-13);
    }
}

TEST(Pou, IndicatorValues) {
    const Partition p = build_partition(box(0, 0, 2 * kPi, 2 * kPi), 3, 3);
    EXPECT_EQ(pou_value(p, 4, p.subdomain(4).center), 1.0);
    EXPECT_EQ(pou_value(p, 3, p.subdomain(4).center), 0.0);
    EXPECT_THROW(pou_value(p, 9, {1, 1}), ConfigError);
}

TEST(Pou, IndicatorHalfOpenOwnership) {
    const Partition p = build_partition(box(0, 0, 4, 4), 2, 2);
    // Shared edge x = 2 belongs to the right subdomain; the outer edges x = 4, y = 4 stay owned.
    EXPECT_EQ(p.locate({2.0, 1.0}), p.index(1, 0));
    EXPECT_EQ(p.locate({4.0, 4.0}), p.index(1, 1));
    EXPECT_EQ(p.locate({0.0, 0.0}), p.index(0, 0));
    EXPECT_THROW(p.locate({4.0 + 1e-12, 1.0}), ConfigError);
}

TEST(Pou, IndicatorSumsToOneProperty) {
    const Partition p = build_partition(box(0, 0, 3, 2), 3, 4);
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> grid(0, 12);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        // Half the draws sit exactly on grid lines (interfaces and the outer boundary).
        const bool on_lines = trial % 2 == 0;
        const Vec2 x = on_lines ? Vec2{3.0 * grid(gen) / 12.0, 2.0 * grid(gen) / 12.0} : Vec2{3 * u01(gen), 2 * u01(gen)};
        double sum = 0.0;
        for (int n = 0; n < p.size(); ++n) sum += pou_value(p, n, x);
        EXPECT_EQ(sum, 1.0);
    }
}

TEST(Pou, SinBlendPlateauAndPartition) {
    const Partition p = build_partition(box(0, 0, 3, 3), 3, 3, PouKind::SinBlend);
    EXPECT_EQ(pou_value(p, 4, p.subdomain(4).center), 1.0);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 400; ++trial) {
        const Vec2 x{u(gen), u(gen)};
        double sum = 0.0;
        for (int n = 0; n < p.size(); ++n) {
            const double w = pou_value(p, n, x);
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
            sum += w;
        }
        EXPECT_NEAR(sum, 1.0, 1e-14);
    }
}

TEST(Pou, SinBlendDerivativeMatchesDifference) {
    const double h = 1e-6;
    for (double s : {-1.2, -1.0, -0.8, 0.8, 0.9, 1.1}) {
        const double fd = (sin_blend_1d(s + h, 0, false, false) - sin_blend_1d(s - h, 0, false, false)) / (2 * h);
        EXPECT_NEAR(sin_blend_1d(s, 1, false, false), fd, 1e-6);
    }
}

TEST(Collocation, CountsAndRoles) {
    const Partition p = build_partition(box(0, 0, 2 * kPi, 2 * kPi), 3, 3);
    EXPECT_EQ(build_collocation(p, 20, 20).size(), 3600u);

    const Partition single = build_partition(box(0, 0, 1, 1), 1, 1);
    const CollocationSet c = build_collocation(single, 2, 2);
    ASSERT_EQ(c.size(), 4u);
    std::set<std::pair<double, double>> corners;
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_TRUE(c.role(i).on_boundary());
        EXPECT_FALSE(c.role(i).on_interface());
        corners.insert({c.points().x[i], c.points().y[i]});
    }
    EXPECT_EQ(corners, (std::set<std::pair<double, double>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
    EXPECT_THROW(build_collocation(single, 1, 4), ConfigError);
}

TEST(Collocation, RoleTagsTwoByTwo) {
    const Partition p = build_partition(box(0, 0, 2, 2), 2, 2);
    const CollocationSet c = build_collocation(p, 5, 4);
    // Subdomain 0: left/bottom on the global boundary, right/top interfaces.
    const auto& r = c.role(c.local_index(0, 4, 0));
    EXPECT_EQ(r.boundary_sides, side_bit(Side::Bottom));
    EXPECT_EQ(r.interface_sides, side_bit(Side::Right));
    EXPECT_TRUE(c.role(c.local_index(0, 2, 1)).interior());
}

TEST(Collocation, InterfacesListedOnce) {
    const Partition p = build_partition(box(0, 0, 2, 2), 2, 2);
    const CollocationSet c = build_collocation(p, 6, 5);
    std::set<std::pair<int, int>> seen;
    for (const auto& ip : c.interfaces()) {
        EXPECT_LT(ip.lower, ip.upper);
        EXPECT_TRUE(seen.insert({ip.lower, ip.upper}).second);
    }
    EXPECT_EQ(c.interfaces().size(), 4u);
}

TEST(Collocation, WeightsSumToAreaProperty) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int nx = 1 + static_cast<int>(gen() % 4), ny = 1 + static_cast<int>(gen() % 4);
        const int qx = 2 + static_cast<int>(gen() % 20), qy = 2 + static_cast<int>(gen() % 20);
        const DomainBox d = box(-1.5, 0.25, 7.0, 3.0);
        const CollocationSet c = build_collocation(build_partition(d, nx, ny), qx, qy);
        double sum = 0.0;
        for (double w : c.weights()) sum += w;
        EXPECT_NEAR(sum / d.area(), 1.0, 1e-12);
    }
}

TEST(Collocation, InterfacePointsCoincideBitwise) {
    const Partition p = build_partition(box(0, 0, 2 * kPi, 2 * kPi), 3, 3);
    const CollocationSet c = build_collocation(p, 17, 13);
    for (const auto& ip : c.interfaces()) {
        const bool xdir = ip.axis == Axis::X;
        const auto a = c.edge(ip.lower, xdir ? Side::Right : Side::Top);
        const auto b = c.edge(ip.upper, xdir ? Side::Left : Side::Bottom);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            EXPECT_EQ(c.points().x[a[k]], c.points().x[b[k]]);
            EXPECT_EQ(c.points().y[a[k]], c.points().y[b[k]]);
        }
    }
    for (int iy = 0; iy < 3; ++iy) EXPECT_EQ(p.neighbor(p.index(0, iy), Side::Right).value(), p.index(0, iy) + 3);
}

TEST(TestGridBuild, SizesCornersWeights) {
    const TestGrid g = build_test_grid(box(0, 0, 2 * kPi, 2 * kPi), 40, 40);
    EXPECT_EQ(g.size(), 1600u);
    const TestGrid c = build_test_grid(box(0, 0, 1, 1), 2, 2);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c.points.at(0), (Vec2{0, 0}));
    EXPECT_EQ(c.points.at(3), (Vec2{1, 1}));
    const TestGrid m = build_test_grid(box(0, 0, 50, 50), 100, 100, GridKind::CellCentered);
    for (double w : m.weights) EXPECT_DOUBLE_EQ(w, 2500.0 / 10000.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_GT(m.points.x[i], 0.0);
        EXPECT_LT(m.points.x[i], 50.0);
    }
    EXPECT_THROW(build_test_grid(box(0, 0, 1, 1), 1, 5), ConfigError);
}
