#include "rkrfm/cellmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rkrfm/error.hpp"
#include "rkrfm/rng.hpp"

namespace rkrfm {

namespace {

constexpr double kPi = std::numbers::pi;

Jet zero_like(std::size_t points, int order) { return Jet(points, order); }

/// phi (1 - phi)(1 - 2 phi), factored so that phi = 0, 1/2, 1 give exact zeros.
Jet double_well(const Jet& phi) {
    Jet u = phi;
    u *= -1.0;
    u.add_constant(1.0);
    Jet w = phi;
    w *= -2.0;
    w.add_constant(1.0);
    return multiply(multiply(phi, u), w);
}

double area_factor(double area, const CellParams& p) {
    const double a0 = p.target_area();
    return -(4.0 * p.mu / a0) * (1.0 - area / a0);
}

}  // namespace

void CellParams::validate() const {
    if (!(width > 0.0)) throw ConfigError("interface width must be positive");
    if (!(radius > 0.0)) throw ConfigError("target radius must be positive");
    if (!(xi > 0.0)) throw ConfigError("friction xi must be positive");
    if (cells < 1) throw ConfigError("cell count must be >= 1");
    for (double v : {gamma, mu, kappa, zeta})
        if (!std::isfinite(v)) throw ConfigError("cell parameters must be finite");
}

double CellParams::target_area() const { return kPi * radius * radius; }

CellGlobals CellGlobals::zero(int cells) {
    CellGlobals g;
    const auto n = static_cast<std::size_t>(cells);
    g.area.assign(n, 0.0);
    g.s11.assign(n, 0.0);
    g.s12.assign(n, 0.0);
    g.force.assign(n, Eigen::Vector2d::Zero());
    g.velocity.assign(n, Eigen::Vector2d::Zero());
    return g;
}

Jet variation_ch(const Jet& phi, const CellParams& p) {
    if (phi.order() < 2) throw ConfigError("CH variation needs a jet of order >= 2");
    const int r = phi.order() - 2;
    Jet out = zero_like(phi.points(), r);
    out.add_scaled(double_well(phi.truncated(r)), 8.0 * p.gamma / p.width);
    out.add_scaled(phi.laplacian(), -2.0 * p.gamma * p.width);
    return out;
}

Jet variation_area(const Jet& phi, double area, const CellParams& p) {
    Jet out = zero_like(phi.points(), phi.order());
    out.add_scaled(phi, area_factor(area, p));
    return out;
}

Jet variation_rep(std::span<const Jet> phi, int i, const CellParams& p) {
    if (i < 0 || i >= static_cast<int>(phi.size())) throw ConfigError("cell index out of range");
    int r = kMaxDerivativeOrder;
    for (const Jet& j : phi) r = std::min(r, j.order());
    const std::size_t n = phi[i].points();
    Jet out = zero_like(n, r);
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (static_cast<int>(k) == i) continue;
        const Jet sq = multiply(phi[k].truncated(r), phi[k].truncated(r));
        out.add_product(sq, phi[i], 2.0 * p.kappa / p.width);
    }
    return out;
}

CellGlobals cell_globals(std::span<const Jet> phi, std::span<const double> weights, const CellParams& p,
                         TissueFields* fields) {
    const int d = static_cast<int>(phi.size());
    if (d == 0) throw ConfigError("no cells");
    const std::size_t n = phi[0].points();
    if (weights.size() != n) throw ConfigError("quadrature weights do not match the points");
    for (const Jet& j : phi) {
        if (j.order() < 2) throw ConfigError("cell integrals need jets of order >= 2");
        if (j.points() != n) throw ConfigError("cell jets differ in point count");
    }
    CellGlobals g = CellGlobals::zero(d);
    for (int i = 0; i < d; ++i) {
        auto v = phi[i][kValue];
        auto gx = phi[i][kDx];
        auto gy = phi[i][kDy];
        double a = 0.0, s11 = 0.0, s12 = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            a += weights[q] * v[q] * v[q];
            s11 += weights[q] * 0.5 * (gy[q] * gy[q] - gx[q] * gx[q]);
            s12 -= weights[q] * gx[q] * gy[q];
        }
        g.area[i] = a;
        g.s11[i] = s11;
        g.s12[i] = s12;
    }

    const double well = 8.0 * p.gamma / p.width;
    const double lap = 2.0 * p.gamma * p.width;
    const double rep = 2.0 * p.kappa / p.width;
    Eigen::VectorXd P = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd Q11 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd Q12 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> fa(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) fa[i] = area_factor(g.area[i], p);
    for (std::size_t q = 0; q < n; ++q) {
        double tot = 0.0;
        for (int i = 0; i < d; ++i) tot += phi[i][kValue][q] * phi[i][kValue][q];
        double pq = 0.0, q11 = 0.0, q12 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double f = phi[i][kValue][q];
            const double ch = well * f * (1.0 - f) * (1.0 - 2.0 * f) - lap * (phi[i][kDxx][q] + phi[i][kDyy][q]);
            pq += rep * (tot - f * f) * f - ch - fa[i] * f;
            q11 += f * g.s11[i];
            q12 += f * g.s12[i];
        }
        P[static_cast<Eigen::Index>(q)] = pq;
        Q11[static_cast<Eigen::Index>(q)] = q11;
        Q12[static_cast<Eigen::Index>(q)] = q12;
    }
    if (!P.allFinite() || !Q11.allFinite() || !Q12.allFinite())
        throw NumericalError("non-finite tissue pressure or nematic field");

    for (int i = 0; i < d; ++i) {
        auto gx = phi[i][kDx];
        auto gy = phi[i][kDy];
        double fx = 0.0, fy = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const auto k = static_cast<Eigen::Index>(q);
            const double s11 = -P[k] - p.zeta * Q11[k];
            const double s12 = -p.zeta * Q12[k];
            const double s22 = -P[k] + p.zeta * Q11[k];
            fx -= weights[q] * (s11 * gx[q] + s12 * gy[q]);
            fy -= weights[q] * (s12 * gx[q] + s22 * gy[q]);
        }
        g.force[i] = {fx, fy};
        g.velocity[i] = g.force[i] / p.xi;
    }
    if (fields != nullptr) *fields = {std::move(P), std::move(Q11), std::move(Q12)};
    return g;
}

CellModel::CellModel(CellParams params) : params_(params), globals_(CellGlobals::zero(params.cells)) {
    params_.validate();
}

void CellModel::prepare_stage(double, std::span<const Jet> quad_state, std::span<const double> weights) {
    globals_ = cell_globals(quad_state, weights, params_);
}

std::vector<Jet> CellModel::evaluate(double, const PointSet&, std::span<const Jet> state, int out_order) const {
    return rhs(state, globals_, out_order);
}

std::vector<Jet> CellModel::rhs(std::span<const Jet> state, const CellGlobals& g, int out_order) const {
    const int d = params_.cells;
    if (static_cast<int>(state.size()) != d) throw ConfigError("state has the wrong number of cells");
    if (g.cells() != d) throw ConfigError("globals have the wrong number of cells");
    const int r = out_order;
    if (r < 0) throw ConfigError("negative output order");
    for (const Jet& j : state)
        if (j.order() < r + 2)
            throw ConfigError("cell right-hand side of order " + std::to_string(r) + " needs state jets of order " +
                              std::to_string(r + 2));
    const std::size_t n = state[0].points();

    std::vector<Jet> low;
    low.reserve(static_cast<std::size_t>(d));
    for (const Jet& j : state) low.push_back(j.truncated(r));
    std::vector<Jet> sq;
    sq.reserve(static_cast<std::size_t>(d));
    Jet tot = zero_like(n, r);
    for (const Jet& j : low) {
        sq.push_back(multiply(j, j));
        tot += sq.back();
    }

    std::vector<Jet> out;
    out.reserve(static_cast<std::size_t>(d));
    const double rep = 2.0 * params_.kappa / params_.width;
    for (int i = 0; i < d; ++i) {
        Jet f = zero_like(n, r);
        f.add_scaled(variation_ch(state[i].truncated(r + 2), params_), -1.0);
        f.add_scaled(low[i], -area_factor(g.area[i], params_));
        Jet others = tot;
        others -= sq[i];
        f.add_product(others, low[i], -rep);
        const Eigen::Vector2d& v = g.velocity[i];
        if (v.x() != 0.0) f.add_scaled(state[i].shifted(kDx), -v.x());
        if (v.y() != 0.0) f.add_scaled(state[i].shifted(kDy), -v.y());
        out.push_back(std::move(f));
    }
    return out;
}

Observables observables(const Eigen::MatrixXd& values, std::span<const double> weights, const CellGlobals& g) {
    const Eigen::Index n = values.rows();
    if (static_cast<std::size_t>(n) != weights.size()) throw ConfigError("weights do not match the grid");
    if (values.cols() != g.cells()) throw ConfigError("values and globals differ in cell count");
    double wsum = 0.0, v2 = 0.0, s2 = 0.0, speed = 0.0, vx = 0.0, vy = 0.0, m11 = 0.0, m12 = 0.0, ang = 0.0;
    for (Eigen::Index q = 0; q < n; ++q) {
        double fx = 0.0, fy = 0.0, f11 = 0.0, f12 = 0.0;
        for (Eigen::Index i = 0; i < values.cols(); ++i) {
            const double phi = values(q, i);
            fx += phi * g.velocity[i].x();
            fy += phi * g.velocity[i].y();
            f11 += phi * g.s11[i];
            f12 += phi * g.s12[i];
        }
        const double w = weights[static_cast<std::size_t>(q)];
        wsum += w;
        v2 += w * (fx * fx + fy * fy);
        s2 += w * (f11 * f11 + f12 * f12);
        speed += w * std::hypot(fx, fy);
        vx += w * fx;
        vy += w * fy;
        m11 += w * f11;
        m12 += w * f12;
        ang += w * std::atan2(f12, f11);
    }
    Observables o;
    o.v_rms = std::sqrt(v2 / wsum);
    o.s_rms = std::sqrt(s2 / wsum);
    o.mean_speed = speed / wsum;
    o.mean_component_speed = std::hypot(vx / wsum, vy / wsum);
    o.mean_component_order = std::hypot(m11 / wsum, m12 / wsum);
    o.mean_angle = ang / wsum;
    return o;
}

Observables observables(const FittedField& field, const Quadrature& grid, const CellParams& p,
                        CellGlobals* globals_out) {
    const std::vector<Jet> jets = field.eval_jet(grid.points, 2);
    const CellGlobals g = cell_globals(jets, grid.weights, p);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.points.size()), field.components());
    for (int i = 0; i < field.components(); ++i) {
        auto v = jets[i].values();
        std::copy(v.begin(), v.end(), values.col(i).data());
    }
    if (globals_out != nullptr) *globals_out = g;
    return observables(values, grid.weights, g);
}

double disc_profile(Vec2 x, Vec2 center, double r, double width, const DomainBox& domain, bool periodic) {
    double dx = x.x - center.x;
    double dy = x.y - center.y;
    if (periodic) {
        dx -= domain.width() * std::round(dx / domain.width());
        dy -= domain.height() * std::round(dy / domain.height());
    }
    return 0.5 * (1.0 + std::tanh((r - std::hypot(dx, dy)) / width));
}

std::vector<Vec2> random_centers(const DomainBox& domain, int cells, std::uint64_t seed, double min_separation,
                                 bool periodic) {
    if (cells < 1) throw ConfigError("cell count must be >= 1");
    constexpr std::uint32_t kAttempts = 10000;
    const Philox4x32 rng(seed);
    const auto purpose = static_cast<std::uint32_t>(RngPurpose::CellCenters);
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) {
        bool placed = false;
        for (std::uint32_t attempt = 0; attempt < kAttempts && !placed; ++attempt) {
            const auto ci = static_cast<std::uint32_t>(i);
            const Vec2 c{rng.uniform({purpose, ci, attempt, 0}, domain.lower.x, domain.upper.x),
                         rng.uniform({purpose, ci, attempt, 1}, domain.lower.y, domain.upper.y)};
            bool ok = true;
            for (const Vec2& o : out) {
                double dx = c.x - o.x, dy = c.y - o.y;
                if (periodic) {
                    dx -= domain.width() * std::round(dx / domain.width());
                    dy -= domain.height() * std::round(dy / domain.height());
                }
                if (std::hypot(dx, dy) < min_separation) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                out.push_back(c);
                placed = true;
            }
        }
        if (!placed)
            throw ConfigError("could not place cell " + std::to_string(i) + " with separation " +
                              std::to_string(min_separation));
    }
    return out;
}

}  // namespace rkrfm
