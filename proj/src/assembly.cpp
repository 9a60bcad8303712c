#include "rkrfm/assembly.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "rkrfm/error.hpp"
#include "rkrfm/log.hpp"

namespace rkrfm {

const char* block_name(BlockKind b) {
    static constexpr const char* kNames[kBlockKinds] = {"A", "B_x", "B_y", "C0_x", "C0_y", "C1_x", "C1_y"};
    return kNames[static_cast<int>(b)];
}

// ---------------------------------------------------------------------------
// LinearSystem

LinearSystem::LinearSystem(int subdomains, int features, int columns)
    : subdomains_(subdomains), features_(features), columns_(columns) {
    if (subdomains < 1 || features < 1 || columns < 0) throw ConfigError("invalid linear system shape");
}

void LinearSystem::append(std::vector<RowGroup> groups) {
    for (auto& g : groups) {
        if (g.rhs.cols() != columns_) throw ConfigError("row group right-hand side has the wrong column count");
        for (const auto& s : g.segments) {
            if (s.m.rows() != g.rows() || s.m.cols() != features_ || s.subdomain < 0 || s.subdomain >= subdomains_)
                throw ConfigError(std::string("malformed row group in block ") + block_name(g.block));
        }
        if (g.scale.size() != g.rows()) g.scale = Eigen::VectorXd::Ones(g.rows());
        groups_.push_back(std::move(g));
    }
    std::stable_sort(groups_.begin(), groups_.end(),
                     [](const RowGroup& a, const RowGroup& b) { return a.block < b.block; });
}

Eigen::Index LinearSystem::rows() const {
    Eigen::Index r = 0;
    for (const auto& g : groups_) r += g.rows();
    return r;
}

Eigen::Index LinearSystem::rows(BlockKind b) const {
    Eigen::Index r = 0;
    for (const auto& g : groups_)
        if (g.block == b) r += g.rows();
    return r;
}

Eigen::MatrixXd LinearSystem::dense_matrix() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
    Eigen::Index r = 0;
    for (const auto& g : groups_) {
        for (const auto& s : g.segments)
            out.block(r, static_cast<Eigen::Index>(s.subdomain) * features_, g.rows(), features_) += s.m;
        r += g.rows();
    }
    return out;
}

Eigen::MatrixXd LinearSystem::dense_rhs() const {
    Eigen::MatrixXd out(rows(), columns_);
    Eigen::Index r = 0;
    for (const auto& g : groups_) {
        out.middleRows(r, g.rows()) = g.rhs;
        r += g.rows();
    }
    return out;
}

Eigen::VectorXd LinearSystem::row_scales() const {
    Eigen::VectorXd out(rows());
    Eigen::Index r = 0;
    for (const auto& g : groups_) {
        out.segment(r, g.rows()) = g.scale;
        r += g.rows();
    }
    return out;
}

double LinearSystem::residual_norm(const Eigen::MatrixXd& U) const {
    double sq = 0.0;
    for (const auto& g : groups_) {
        Eigen::MatrixXd res = -g.rhs;
        for (const auto& s : g.segments)
            res.noalias() += s.m * U.middleRows(static_cast<Eigen::Index>(s.subdomain) * features_, features_);
        sq += res.squaredNorm();
    }
    return std::sqrt(sq);
}

double LinearSystem::rhs_norm() const {
    double sq = 0.0;
    for (const auto& g : groups_) sq += g.rhs.squaredNorm();
    return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Boundary conditions

BoundaryCondition BoundaryCondition::periodic() { return {Kind::Periodic, {}}; }

BoundaryCondition BoundaryCondition::dirichlet(Eigen::MatrixXd values) {
    return {Kind::DirichletSampled, std::move(values)};
}

namespace {

struct EdgeRef {
    int subdomain;
    Side side;
};

// Dirichlet edge order: Bx then By.
std::vector<EdgeRef> dirichlet_edges(const Partition& p, BlockKind block) {
    std::vector<EdgeRef> out;
    if (block == BlockKind::Bx) {
        for (int iy = 0; iy < p.ny(); ++iy) out.push_back({p.index(0, iy), Side::Left});
        for (int iy = 0; iy < p.ny(); ++iy) out.push_back({p.index(p.nx() - 1, iy), Side::Right});
    } else {
        for (int ix = 0; ix < p.nx(); ++ix) {
            out.push_back({p.index(ix, 0), Side::Bottom});
            out.push_back({p.index(ix, p.ny() - 1), Side::Top});
        }
    }
    return out;
}

PointSet subset(const PointSet& pts, const std::vector<std::size_t>& idx) {
    PointSet out;
    out.x.reserve(idx.size());
    out.y.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(pts.at(i));
    return out;
}

void add_segment(std::vector<Segment>& segs, int sub, const Eigen::MatrixXd& m, double sign) {
    for (auto& s : segs) {
        if (s.subdomain == sub) {
            s.m += sign * m;
            return;
        }
    }
    segs.push_back({sub, sign * m});
}

void add_segments(std::vector<Segment>& segs, const std::vector<Segment>& more, double sign) {
    for (const auto& s : more) add_segment(segs, s.subdomain, s.m, sign);
}

}  // namespace

std::vector<std::size_t> boundary_point_indices(const Partition& partition, const CollocationSet& collocation) {
    std::vector<std::size_t> out;
    for (BlockKind b : {BlockKind::Bx, BlockKind::By}) {
        for (const EdgeRef& e : dirichlet_edges(partition, b)) {
            const auto idx = collocation.edge(e.subdomain, e.side);
            out.insert(out.end(), idx.begin(), idx.end());
        }
    }
    return out;
}

BoundaryCondition dirichlet_from(const Partition& partition, const CollocationSet& collocation,
                                 const std::function<double(Vec2, int)>& g, int components) {
    const auto idx = boundary_point_indices(partition, collocation);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(idx.size()), components);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (int c = 0; c < components; ++c) values(static_cast<Eigen::Index>(r), c) = g(collocation.points().at(idx[r]), c);
    return BoundaryCondition::dirichlet(std::move(values));
}

// ---------------------------------------------------------------------------
// Row construction

std::vector<Segment> field_segments(const FeatureBasis& basis, int owner, const PointSet& points, MultiIndex a,
                                    int set) {
    const Partition& part = basis.partition();
    if (part.pou_kind() == PouKind::Indicator) {
        return {{owner, basis.derivatives(owner, points.x, points.y, a.order(), set).block(a)}};
    }
    std::vector<Segment> out;
    const Subdomain& so = part.subdomain(owner);
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            const int ix = so.ix + dx, iy = so.iy + dy;
            if (ix < 0 || iy < 0 || ix >= part.nx() || iy >= part.ny()) continue;
            const int m = part.index(ix, iy);
            const FeatureDerivatives fd = basis.derivatives(m, points.x, points.y, a.order(), set);
            Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), basis.features());
            bool any = false;
            for (int bx = 0; bx <= a.ax; ++bx) {
                for (int by = 0; by <= a.ay; ++by) {
                    Eigen::VectorXd w(static_cast<Eigen::Index>(points.size()));
                    for (std::size_t q = 0; q < points.size(); ++q)
                        w(static_cast<Eigen::Index>(q)) = part.pou_derivative(m, points.at(q), bx, by);
                    if (w.isZero(0.0)) continue;
                    any = true;
                    const double c = kBinomial[a.ax][bx] * kBinomial[a.ay][by];
                    rows.noalias() += c * (w.asDiagonal() * fd.block({a.ax - bx, a.ay - by}));
                }
            }
            if (any) out.push_back({m, std::move(rows)});
        }
    }
    return out;
}

std::vector<RowGroup> assemble_interior(const FeatureBasis& basis, const CollocationSet& collocation,
                                        const Eigen::MatrixXd& targets, int set) {
    const Partition& part = basis.partition();
    if (targets.rows() != static_cast<Eigen::Index>(collocation.size()))
        throw ConfigError("interior targets must have one row per collocation point");
    if (collocation.subdomains() != part.size()) throw ConfigError("collocation set does not match the partition");
    std::vector<RowGroup> out;
    const int q = collocation.per_subdomain();
    for (int n = 0; n < part.size(); ++n) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(q));
        for (int i = 0; i < q; ++i) idx[i] = collocation.offset(n) + i;
        RowGroup g;
        g.block = BlockKind::A;
        g.segments = field_segments(basis, n, subset(collocation.points(), idx), kValue, set);
        g.rhs = targets.middleRows(static_cast<Eigen::Index>(collocation.offset(n)), q);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<RowGroup> assemble_boundary(const FeatureBasis& basis, const CollocationSet& collocation,
                                        const BoundaryCondition& bc, int columns, int set) {
    const Partition& part = basis.partition();
    const PointSet& pts = collocation.points();
    std::vector<RowGroup> out;
    if (bc.kind == BoundaryCondition::Kind::DirichletSampled) {
        const auto all = boundary_point_indices(part, collocation);
        if (bc.values.rows() != static_cast<Eigen::Index>(all.size()))
            throw ConfigError("Dirichlet values missing: expected " + std::to_string(all.size()) + " rows, got " +
                              std::to_string(bc.values.rows()));
        if (bc.values.cols() != columns) throw ConfigError("Dirichlet values have the wrong column count");
        Eigen::Index cursor = 0;
        for (BlockKind b : {BlockKind::Bx, BlockKind::By}) {
            for (const EdgeRef& e : dirichlet_edges(part, b)) {
                const auto idx = collocation.edge(e.subdomain, e.side);
                RowGroup g;
                g.block = b;
                g.segments = field_segments(basis, e.subdomain, subset(pts, idx), kValue, set);
                g.rhs = bc.values.middleRows(cursor, static_cast<Eigen::Index>(idx.size()));
                cursor += static_cast<Eigen::Index>(idx.size());
                out.push_back(std::move(g));
            }
        }
        return out;
    }

    // Periodic: value and normal-derivative difference rows between paired opposite edges.
    auto pair_rows = [&](BlockKind b, int lo, Side lo_side, int hi, Side hi_side, MultiIndex a) {
        const auto ilo = collocation.edge(lo, lo_side);
        const auto ihi = collocation.edge(hi, hi_side);
        RowGroup g;
        g.block = b;
        add_segments(g.segments, field_segments(basis, lo, subset(pts, ilo), a, set), 1.0);
        add_segments(g.segments, field_segments(basis, hi, subset(pts, ihi), a, set), -1.0);
        g.rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ilo.size()), columns);
        out.push_back(std::move(g));
    };
    for (MultiIndex a : {kValue, kDx})
        for (int iy = 0; iy < part.ny(); ++iy)
            pair_rows(BlockKind::Bx, part.index(0, iy), Side::Left, part.index(part.nx() - 1, iy), Side::Right, a);
    for (MultiIndex a : {kValue, kDy})
        for (int ix = 0; ix < part.nx(); ++ix)
            pair_rows(BlockKind::By, part.index(ix, 0), Side::Bottom, part.index(ix, part.ny() - 1), Side::Top, a);
    return out;
}

std::vector<RowGroup> assemble_continuity(const FeatureBasis& basis, const CollocationSet& collocation, int columns,
                                          int set) {
    const Partition& part = basis.partition();
    if (part.pou_kind() != PouKind::Indicator) {
        log_warn("continuity rows skipped: the sine-blend partition of unity is already smooth");
        return {};
    }
    const PointSet& pts = collocation.points();
    std::vector<RowGroup> out;
    for (const InterfacePair& ip : collocation.interfaces()) {
        const bool xdir = ip.axis == Axis::X;
        const auto ilo = collocation.edge(ip.lower, xdir ? Side::Right : Side::Top);
        const auto ihi = collocation.edge(ip.upper, xdir ? Side::Left : Side::Bottom);
        const PointSet plo = subset(pts, ilo), phi = subset(pts, ihi);
        const FeatureDerivatives dlo = basis.derivatives(ip.lower, plo.x, plo.y, 1, set);
        const FeatureDerivatives dhi = basis.derivatives(ip.upper, phi.x, phi.y, 1, set);
        const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ilo.size()), columns);
        const MultiIndex d1 = xdir ? kDx : kDy;
        out.push_back({xdir ? BlockKind::C0x : BlockKind::C0y,
                       {{ip.lower, dlo.block(kValue)}, {ip.upper, -dhi.block(kValue)}},
                       zero,
                       {}});
        out.push_back({xdir ? BlockKind::C1x : BlockKind::C1y,
                       {{ip.lower, dlo.block(d1)}, {ip.upper, -dhi.block(d1)}},
                       zero,
                       {}});
    }
    return out;
}

LinearSystem assemble_system(const FeatureBasis& basis, const CollocationSet& collocation,
                             const Eigen::MatrixXd& targets, const BoundaryCondition& bc, int set) {
    const int columns = static_cast<int>(targets.cols());
    LinearSystem sys(basis.partition().size(), basis.features(), columns);
    sys.append(assemble_interior(basis, collocation, targets, set));
    sys.append(assemble_boundary(basis, collocation, bc, columns, set));
    sys.append(assemble_continuity(basis, collocation, columns, set));
    return sys;
}

void apply_rescaling(LinearSystem& system, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("rescaling constant must be positive");
    Eigen::Index block_row[kBlockKinds] = {};
    for (auto& g : system.groups()) {
        Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(g.rows());
        for (const auto& s : g.segments) rowmax = rowmax.cwiseMax(s.m.cwiseAbs().rowwise().maxCoeff());
        Eigen::Index& base = block_row[static_cast<int>(g.block)];
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            if (!(rowmax(i) > 0.0) || !std::isfinite(rowmax(i)))
                throw SolverError(std::string("all-zero or non-finite row ") + std::to_string(base + i) +
                                  " in block " + block_name(g.block));
        }
        const Eigen::VectorXd lambda = c * rowmax.cwiseInverse();
        for (auto& s : g.segments) s.m = lambda.asDiagonal() * s.m;
        g.rhs = lambda.asDiagonal() * g.rhs;
        g.scale = g.scale.cwiseProduct(lambda);
        base += g.rows();
    }
    system.set_rescale_constant(c);
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

bool structured_possible(const LinearSystem& system) {
    std::vector<bool> has_local(static_cast<std::size_t>(system.subdomains()), false);
    for (const auto& g : system.groups())
        if (g.local()) has_local[g.segments.front().subdomain] = true;
    return std::all_of(has_local.begin(), has_local.end(), [](bool b) { return b; });
}

struct SplitSystem {
    std::vector<Eigen::MatrixXd> local;
    std::vector<Eigen::MatrixXd> local_rhs;
    Eigen::MatrixXd coupling;
    Eigen::MatrixXd coupling_rhs;
};

SplitSystem split(const LinearSystem& system, bool with_matrix) {
    const int N = system.subdomains();
    const int J = system.features();
    const int d = system.rhs_cols();
    std::vector<Eigen::Index> local_rows(N, 0);
    Eigen::Index coupling_rows = 0;
    for (const auto& g : system.groups()) {
        if (g.local())
            local_rows[g.segments.front().subdomain] += g.rows();
        else
            coupling_rows += g.rows();
    }
    SplitSystem s;
    s.local.resize(N);
    s.local_rhs.resize(N);
    for (int n = 0; n < N; ++n) {
        if (with_matrix) s.local[n].resize(local_rows[n], J);
        s.local_rhs[n].resize(local_rows[n], d);
    }
    if (with_matrix) s.coupling = Eigen::MatrixXd::Zero(coupling_rows, system.cols());
    s.coupling_rhs.resize(coupling_rows, d);
    std::vector<Eigen::Index> cursor(N, 0);
    Eigen::Index ccur = 0;
    for (const auto& g : system.groups()) {
        if (g.local()) {
            const int n = g.segments.front().subdomain;
            if (with_matrix) s.local[n].middleRows(cursor[n], g.rows()) = g.segments.front().m;
            s.local_rhs[n].middleRows(cursor[n], g.rows()) = g.rhs;
            cursor[n] += g.rows();
        } else {
            if (with_matrix)
                for (const auto& seg : g.segments)
                    s.coupling.block(ccur, static_cast<Eigen::Index>(seg.subdomain) * J, g.rows(), J) += seg.m;
            s.coupling_rhs.middleRows(ccur, g.rows()) = g.rhs;
            ccur += g.rows();
        }
    }
    return s;
}

void warn_if_underdetermined(const LinearSystem& system) {
    if (system.rows() < system.cols())
        log_warn("least-squares system has fewer rows (" + std::to_string(system.rows()) + ") than unknowns (" +
                 std::to_string(system.cols()) + ")");
}

}  // namespace

SolveResult solve_least_squares(const LinearSystem& system, const SolveOptions& options) {
    CachedSolver solver(options);
    solver.factor(system);
    return solver.solve(system);
}

void CachedSolver::factor(const LinearSystem& system) {
    warn_if_underdetermined(system);
    structured_ = options_.backend == SolverBackend::Structured && structured_possible(system);
    if (structured_) {
        SplitSystem s = split(system, true);
        blocks_.factor(s.local, s.coupling, options_.rtol);
    } else {
        const Eigen::MatrixXd a = system.dense_matrix();
        if (!a.allFinite()) throw NumericalError("non-finite entries in least-squares matrix");
        const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
        const lapack_int k = std::min(m, n);
        Eigen::MatrixXd work = a, u(m, k), vt(k, n);
        Eigen::VectorXd s(k);
        const lapack_int info =
            LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, s.data(), u.data(), m, vt.data(), k);
        if (info != 0) throw SolverError("dgesdd failed with info = " + std::to_string(info));
        int keep = 0;
        while (keep < k && s(keep) > options_.rtol * s(0)) ++keep;
        dense_rank_ = keep;
        dense_pinv_ = vt.topRows(keep).transpose() * s.head(keep).cwiseInverse().asDiagonal() *
                      u.leftCols(keep).transpose();
    }
    factored_ = true;
}

SolveResult CachedSolver::solve(const LinearSystem& system) const {
    if (!factored_) throw SolverError("solver used before factorization");
    SolveResult r;
    if (structured_) {
        SplitSystem s = split(system, false);
        r.U = blocks_.solve(s.local_rhs, s.coupling_rhs);
        r.rank = blocks_.reduced_rank();
    } else {
        const Eigen::MatrixXd f = system.dense_rhs();
        if (!f.allFinite()) throw NumericalError("non-finite entries in least-squares right-hand side");
        if (f.rows() != dense_pinv_.cols()) throw ConfigError("system does not match the cached factorization");
        r.U.resize(dense_pinv_.rows(), f.cols());
        for (Eigen::Index c = 0; c < f.cols(); ++c) r.U.col(c).noalias() = dense_pinv_ * f.col(c);
        r.rank = dense_rank_;
    }
    r.residual = system.residual_norm(r.U);
    r.rhs_norm = system.rhs_norm();
    return r;
}

// ---------------------------------------------------------------------------
// FittedField

FittedField::FittedField(FeatureBasis basis, Eigen::MatrixXd U, double t)
    : basis_(std::move(basis)), U_(std::move(U)), t_(t) {
    if (U_.rows() != static_cast<Eigen::Index>(basis_.partition().size()) * basis_.features())
        throw ConfigError("coefficient matrix does not match the basis size");
    if (basis_.parameter_sets() > 1 && basis_.parameter_sets() != U_.cols())
        throw ConfigError("per-component bases need one parameter set per component");
}

std::vector<Jet> FittedField::eval_jet(const PointSet& points, int order) const {
    if (order < 0 || order > kMaxDerivativeOrder) throw ConfigError("jet order out of range");
    const Partition& part = partition();
    const int d = components();
    const int J = basis_.features();
    std::vector<Jet> out(static_cast<std::size_t>(d), Jet(points.size(), order));
    const int entries = midx_count(order);

    // Points per subdomain: owners for the indicator partition, the weight support otherwise.
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(part.size()));
    if (part.pou_kind() == PouKind::Indicator) {
        const bool have_owner = points.owner.size() == points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const int n = have_owner ? points.owner[i] : part.locate(points.at(i));
            members[n].push_back(i);
        }
    } else {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!part.contains(points.at(i))) part.locate(points.at(i));  // throws with a clear message
            for (int n : part.supporting(points.at(i))) members[n].push_back(i);
        }
    }

    for (int n = 0; n < part.size(); ++n) {
        const auto& idx = members[n];
        if (idx.empty()) continue;
        std::vector<double> x(idx.size()), y(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            x[k] = points.x[idx[k]];
            y[k] = points.y[idx[k]];
        }
        for (int set = 0; set < basis_.parameter_sets(); ++set) {
            const FeatureDerivatives fd = basis_.derivatives(n, x, y, order, set);
            const int c0 = basis_.parameter_sets() == 1 ? 0 : set;
            const int nc = basis_.parameter_sets() == 1 ? d : 1;
            const auto Un = U_.block(static_cast<Eigen::Index>(n) * J, c0, J, nc);
            // g[c][p][k]: derivative p of the subdomain expansion at local point k.
            std::vector<Jet> g(static_cast<std::size_t>(nc), Jet(idx.size(), order));
            for (int p = 0; p < entries; ++p) {
                const MultiIndex a = midx_at(p);
                const Eigen::MatrixXd scaled = fd.factor(a).matrix().asDiagonal() * Un;
                const Eigen::MatrixXd vals = fd.sigma[a.order()] * scaled;
                for (int c = 0; c < nc; ++c) std::copy_n(vals.col(c).data(), idx.size(), g[c].at(p).data());
            }
            if (part.pou_kind() == PouKind::Indicator) {
                for (int c = 0; c < nc; ++c)
                    for (int p = 0; p < entries; ++p) {
                        auto src = g[c].at(p);
                        auto dst = out[c0 + c].at(p);
                        for (std::size_t k = 0; k < idx.size(); ++k) dst[idx[k]] = src[k];
                    }
            } else {
                Jet psi(idx.size(), order);
                for (int p = 0; p < entries; ++p) {
                    const MultiIndex a = midx_at(p);
                    for (std::size_t k = 0; k < idx.size(); ++k)
                        psi.at(p)[k] = part.pou_derivative(n, {x[k], y[k]}, a.ax, a.ay);
                }
                for (int c = 0; c < nc; ++c) {
                    const Jet prod = multiply(psi, g[c]);
                    for (int p = 0; p < entries; ++p) {
                        auto src = prod.at(p);
                        auto dst = out[c0 + c].at(p);
                        for (std::size_t k = 0; k < idx.size(); ++k) dst[idx[k]] += src[k];
                    }
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd FittedField::eval(const PointSet& points, MultiIndex a) const {
    if (!midx_valid(a)) throw ConfigError("derivative order exceeds the supported cap");
    const auto jets = eval_jet(points, a.order());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), components());
    for (int c = 0; c < components(); ++c) {
        auto v = jets[c][a];
        std::copy(v.begin(), v.end(), out.col(c).data());
    }
    return out;
}

Eigen::MatrixXd eval_field(const FittedField& field, const PointSet& points, MultiIndex a) {
    return field.eval(points, a);
}

// ---------------------------------------------------------------------------
// Binary dumps

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    const std::uint64_t shape[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    f.write(reinterpret_cast<const char*>(shape), sizeof(shape));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    f.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (!f) throw ConfigError("failed writing " + path);
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    std::uint64_t shape[2];
    f.read(reinterpret_cast<char*>(shape), sizeof(shape));
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(static_cast<Eigen::Index>(shape[0]),
                                                                              static_cast<Eigen::Index>(shape[1]));
    f.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (!f) throw ConfigError("truncated matrix file " + path);
    return rm;
}

void dump_system(const LinearSystem& system, const std::string& directory, const Eigen::MatrixXd* U) {
    std::filesystem::create_directories(directory);
    const std::filesystem::path dir(directory);
    write_matrix_binary((dir / "matrix.bin").string(), system.dense_matrix());
    write_matrix_binary((dir / "rhs.bin").string(), system.dense_rhs());
    write_matrix_binary((dir / "scales.bin").string(), system.row_scales());
    if (U != nullptr) write_matrix_binary((dir / "U.bin").string(), *U);
}

}  // namespace rkrfm
