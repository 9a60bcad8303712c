#include "rkrfm/integrator.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "rkrfm/error.hpp"
#include "rkrfm/log.hpp"

namespace rkrfm {

void RKTableau::validate() const {
    const int p = stages();
    if (p < 1) throw ConfigError("tableau " + name + " has no stages");
    if (static_cast<int>(a.size()) != p || static_cast<int>(c.size()) != p)
        throw ConfigError("tableau " + name + " has inconsistent sizes");
    for (int i = 0; i < p; ++i) {
        if (static_cast<int>(a[i].size()) != i) throw ConfigError("tableau " + name + " is not strictly explicit");
    }
    double sum = 0.0;
    for (double bi : b) sum += bi;
    if (std::abs(sum - 1.0) > 1e-14) throw ConfigError("tableau " + name + " weights do not sum to one");
}

RKTableau RKTableau::heun() { return {"heun", {{}, {1.0}}, {0.5, 0.5}, {0.0, 1.0}}; }

RKTableau RKTableau::midpoint() { return {"midpoint", {{}, {0.5}}, {0.0, 1.0}, {0.0, 0.5}}; }

RKTableau RKTableau::kutta3() {
    return {"kutta3", {{}, {0.5}, {-1.0, 2.0}}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {0.0, 0.5, 1.0}};
}

RKTableau tableau_by_name(const std::string& name) {
    if (name == "heun") return RKTableau::heun();
    if (name == "midpoint") return RKTableau::midpoint();
    if (name == "kutta3") return RKTableau::kutta3();
    throw ConfigError("unknown tableau '" + name + "' (expected heun, midpoint or kutta3)");
}

TimeGrid::TimeGrid(double final_time, int steps) : T(final_time), K(steps) {
    if (!(final_time >= 0.0) || !std::isfinite(final_time)) throw ConfigError("final time must be non-negative");
    if (steps < 0) throw ConfigError("step count must be non-negative");
    if (steps == 0 && final_time != 0.0) throw ConfigError("zero steps require T = 0");
}

TimeGrid TimeGrid::from_step(double final_time, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const double k = final_time / dt;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, k))
        throw ConfigError("time step does not divide the final time");
    return TimeGrid(final_time, static_cast<int>(kr));
}

Quadrature Quadrature::from(const TestGrid& grid) { return {grid.points, grid.weights}; }

void RhsModel::prepare_stage(double, std::span<const Jet>, std::span<const double>) {}

int required_order(const RhsModel& model, const RKTableau& tableau) {
    return model.spatial_order() * tableau.stages();
}

namespace {

std::vector<Jet> slice_all(const std::vector<Jet>& jets, std::size_t first, std::size_t count) {
    std::vector<Jet> out;
    out.reserve(jets.size());
    for (const Jet& j : jets) out.push_back(j.slice(first, count));
    return out;
}

void check_stage(const std::vector<Jet>& d, int stage, const PointSet& points) {
    for (std::size_t c = 0; c < d.size(); ++c) {
        if (d[c].all_finite()) continue;
        const Jet& j = d[c];
        for (int p = 0; p < j.entries(); ++p) {
            auto v = j.at(p);
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (std::isfinite(v[k])) continue;
                std::ostringstream os;
                os << "non-finite stage value: stage " << stage + 1 << ", component " << c << ", point " << k
                   << " (" << points.x[k] << ", " << points.y[k] << ")";
                throw NumericalError(os.str());
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd rk_target(RhsModel& model, const FittedField& field, const RKTableau& tableau, double t, double dt,
                          const PointSet& collocation, const Quadrature* quadrature) {
    tableau.validate();
    const int m = model.spatial_order();
    const int p = tableau.stages();
    const int cap = m * p;
    if (cap > kMaxDerivativeOrder)
        throw ConfigError("stage evaluation needs derivatives of order " + std::to_string(cap) +
                          " but the basis supports " + std::to_string(kMaxDerivativeOrder));
    if (model.components() != field.components())
        throw ConfigError("model and field component counts differ");
    const bool globals = model.needs_globals();
    if (globals && quadrature == nullptr) throw ConfigError("model needs a quadrature grid");

    const Partition& part = field.partition();
    PointSet all = collocation.owner.size() == collocation.size() ? collocation : collocation.with_owners(part);
    const std::size_t nc = collocation.size();
    std::size_t nq = 0;
    if (globals) {
        const PointSet q = quadrature->points.with_owners(part);
        nq = q.size();
        all.x.insert(all.x.end(), q.x.begin(), q.x.end());
        all.y.insert(all.y.end(), q.y.begin(), q.y.end());
        all.owner.insert(all.owner.end(), q.owner.begin(), q.owner.end());
    }

    const std::vector<Jet> base = field.eval_jet(all, cap);
    const std::size_t d = base.size();
    std::vector<std::vector<Jet>> D;
    D.reserve(static_cast<std::size_t>(p));

    for (int i = 0; i < p; ++i) {
        const int r = m * (p - i);
        const double ti = t + tableau.c[i] * dt;
        std::vector<Jet> Y;
        Y.reserve(d);
        for (std::size_t c = 0; c < d; ++c) {
            Jet y = base[c].truncated(r);
            for (int j = 0; j < i; ++j) {
                if (tableau.a[i][j] != 0.0) y.add_scaled(D[j][c], dt * tableau.a[i][j]);
            }
            Y.push_back(std::move(y));
        }
        if (globals) {
            const std::vector<Jet> yq = slice_all(Y, nc, nq);
            model.prepare_stage(ti, yq, quadrature->weights);
        }
        // The last stage is only needed at the collocation points.
        const bool last = i == p - 1;
        if (last && globals) {
            Y = slice_all(Y, 0, nc);
            std::vector<Jet> di = model.evaluate(ti, collocation, Y, r - m);
            check_stage(di, i, collocation);
            D.push_back(std::move(di));
        } else {
            std::vector<Jet> di = model.evaluate(ti, all, Y, r - m);
            check_stage(di, i, all);
            D.push_back(std::move(di));
        }
    }

    Eigen::MatrixXd target(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) {
        Jet acc = base[c].slice(0, nc).truncated(0);
        for (int i = 0; i < p; ++i) {
            if (tableau.b[i] == 0.0) continue;
            acc.add_scaled(D[i][c].slice(0, nc), dt * tableau.b[i]);
        }
        auto v = acc.values();
        std::copy(v.begin(), v.end(), target.col(static_cast<Eigen::Index>(c)).data());
    }
    return target;
}

BasisFactory sampled_bases(const Partition& partition, const BasisConfig& config) {
    return [partition, config](std::uint64_t step) {
        return sample_basis(partition, config.features, config.bound, config.activation, config.seed,
                            config.regenerate ? step : 0, config.parameter_sets);
    };
}

std::function<BoundaryCondition(double)> periodic_boundary() {
    return [](double) { return BoundaryCondition::periodic(); };
}

std::function<BoundaryCondition(double)> dirichlet_boundary(const Partition& partition,
                                                            const CollocationSet& collocation,
                                                            std::function<double(Vec2, double, int)> g,
                                                            int components) {
    const std::vector<std::size_t> idx = boundary_point_indices(partition, collocation);
    std::vector<Vec2> pts;
    pts.reserve(idx.size());
    for (std::size_t i : idx) pts.push_back(collocation.points().at(i));
    return [pts = std::move(pts), g = std::move(g), components](double t) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(pts.size()), components);
        for (std::size_t k = 0; k < pts.size(); ++k)
            for (int c = 0; c < components; ++c) v(static_cast<Eigen::Index>(k), c) = g(pts[k], t, c);
        return BoundaryCondition::dirichlet(std::move(v));
    };
}

namespace {

struct Fitter {
    const Problem& problem;
    const AdvanceOptions& options;
    CachedSolver cache;

    Fitter(const Problem& pr, const AdvanceOptions& opt) : problem(pr), options(opt), cache(opt.solve) {}

    std::pair<FittedField, double> fit(const FeatureBasis& basis, const Eigen::MatrixXd& targets, double t) {
        const int sets = basis.parameter_sets();
        const BoundaryCondition bc = problem.boundary(t);
        if (sets == 1) {
            LinearSystem sys = assemble_system(basis, problem.collocation, targets, bc);
            apply_rescaling(sys, options.rescale);
            SolveResult r;
            if (options.cache_factorization) {
                if (!cache.factored()) cache.factor(sys);
                r = cache.solve(sys);
            } else {
                r = solve_least_squares(sys, options.solve);
            }
            return {FittedField(basis, std::move(r.U), t), r.residual};
        }
        // One parameter set per component: separate systems, one column each.
        Eigen::MatrixXd U(static_cast<Eigen::Index>(basis.partition().size()) * basis.features(), targets.cols());
        double res2 = 0.0;
        for (Eigen::Index c = 0; c < targets.cols(); ++c) {
            BoundaryCondition bcc = bc;
            if (bc.values.size() != 0) bcc.values = bc.values.col(c);
            LinearSystem sys = assemble_system(basis, problem.collocation, targets.col(c), bcc,
                                               basis.set_for_component(static_cast<int>(c)));
            apply_rescaling(sys, options.rescale);
            SolveResult r = solve_least_squares(sys, options.solve);
            U.col(c) = r.U.col(0);
            res2 += r.residual * r.residual;
        }
        return {FittedField(basis, std::move(U), t), std::sqrt(res2)};
    }
};

template <class E>
[[noreturn]] void rethrow_with_step(const E& e, int step) {
    throw E("step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

std::vector<FittedField> advance(Problem& problem, const BasisFactory& bases, const RKTableau& tableau,
                                 const TimeGrid& grid, const std::vector<StepSink>& sinks,
                                 const AdvanceOptions& options) {
    if (problem.model == nullptr) throw ConfigError("problem has no model");
    if (!problem.initial || !problem.boundary) throw ConfigError("problem needs initial and boundary data");
    tableau.validate();
    RhsModel& model = *problem.model;
    if (required_order(model, tableau) > kMaxDerivativeOrder)
        throw ConfigError("stage evaluation needs derivatives beyond the basis cap");
    const int d = model.components();
    const PointSet& colloc = problem.collocation.points();
    using clock = std::chrono::steady_clock;

    Fitter fitter(problem, options);
    std::vector<FittedField> history;

    auto emit = [&](int k, const FittedField& f, double res, double secs) {
        const StepInfo info{k, f.time(), &f, res, secs};
        for (const auto& s : sinks) s(info);
    };

    auto t0 = clock::now();
    Eigen::MatrixXd h(static_cast<Eigen::Index>(colloc.size()), d);
    for (std::size_t i = 0; i < colloc.size(); ++i)
        for (int c = 0; c < d; ++c) h(static_cast<Eigen::Index>(i), c) = problem.initial(colloc.at(i), c);
    auto [field, residual] = fitter.fit(bases(0), h, 0.0);
    emit(0, field, residual, std::chrono::duration<double>(clock::now() - t0).count());
    if (options.history == History::All || grid.K == 0) history.push_back(field);

    for (int k = 0; k < grid.K; ++k) {
        t0 = clock::now();
        const double tk = grid.time(k);
        const double tn = grid.time(k + 1);
        try {
            const Eigen::MatrixXd target =
                rk_target(model, field, tableau, tk, tn - tk, colloc, problem.quadrature);
            auto [next, res] = fitter.fit(bases(static_cast<std::uint64_t>(k) + 1), target, tn);
            field = std::move(next);
            residual = res;
        } catch (const NumericalError& e) {
            rethrow_with_step(e, k + 1);
        } catch (const SolverError& e) {
            rethrow_with_step(e, k + 1);
        }
        emit(k + 1, field, residual, std::chrono::duration<double>(clock::now() - t0).count());
        if (options.history == History::All || k + 1 == grid.K) history.push_back(field);
    }
    return history;
}

}  // namespace rkrfm
