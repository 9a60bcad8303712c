#include "rkrfm/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include "rkrfm/error.hpp"
#include "rkrfm/log.hpp"

namespace rkrfm {

namespace {

std::function<double(Vec2, int)> initial_condition(const RunConfig& c) {
    if (c.model == ModelKind::Manufactured) return [](Vec2 x, int comp) { return exact_value(x, 0.0, comp); };
    const std::vector<Vec2> centers = initial_centers(c);
    return [centers, c](Vec2 x, int comp) {
        return disc_profile(x, centers[static_cast<std::size_t>(comp)], c.initial_radius, c.cells.width, c.domain,
                            c.periodic);
    };
}

std::function<BoundaryCondition(double)> boundary(const RunConfig& c, const Setup& s, int comps) {
    if (c.periodic) return periodic_boundary();
    if (c.model == ModelKind::Manufactured)
        return dirichlet_boundary(s.partition, s.collocation,
                                  [](Vec2 x, double t, int comp) { return exact_value(x, t, comp); }, comps);
    // Cells far from the boundary: phi = 0 there.
    return dirichlet_boundary(s.partition, s.collocation, [](Vec2, double, int) { return 0.0; }, comps);
}

int components(const RunConfig& c) { return c.model == ModelKind::Manufactured ? 2 : c.cells.cells; }

Stat stat(const std::vector<double>& v) {
    Stat s;
    if (v.empty()) return {std::nan(""), std::nan("")};
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

}  // namespace

Setup make_setup(const RunConfig& c) {
    c.validate();
    Partition part = build_partition(c.domain, c.nx, c.ny, c.pou);
    CollocationSet col = build_collocation(part, c.qx, c.qy);
    TestGrid test = build_test_grid(c.domain, c.test_x, c.test_y, GridKind::Vertex);
    TestGrid quad = build_test_grid(c.domain, c.quad_x, c.quad_y, GridKind::CellCentered);
    Quadrature q = Quadrature::from(quad);
    BasisConfig b;
    b.features = c.features;
    b.bound = c.bound;
    b.activation = c.activation;
    b.seed = c.seed;
    b.regenerate = c.regenerate;
    b.parameter_sets = c.per_component ? components(c) : 1;
    AdvanceOptions a;
    a.rescale = c.rescale;
    a.solve = {c.backend, c.rtol};
    a.history = History::Final;
    a.cache_factorization = !c.regenerate && !c.per_component;
    return Setup{std::move(part), std::move(col), std::move(test), std::move(quad), std::move(q),
                 TimeGrid(c.final_time, c.steps()), tableau_by_name(c.tableau), b, a};
}

std::uint64_t repetition_seed(std::uint64_t seed, int rep) {
    return rep == 0 ? seed : seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(rep);
}

std::vector<Vec2> initial_centers(const RunConfig& c) {
    if (!c.centers.empty()) return c.centers;
    return random_centers(c.domain, c.cells.cells, c.seed, c.min_separation, c.periodic);
}

FittedField run_fit(const RunConfig& c, ErrorReport* report, const std::string& dump_dir) {
    const Setup s = make_setup(c);
    const int d = components(c);
    const auto h = initial_condition(c);
    const PointSet& pts = s.collocation.points();
    Eigen::MatrixXd targets(static_cast<Eigen::Index>(pts.size()), d);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int k = 0; k < d; ++k) targets(static_cast<Eigen::Index>(i), k) = h(pts.at(i), k);
    const auto t0 = std::chrono::steady_clock::now();
    const FeatureBasis basis = sampled_bases(s.partition, s.basis)(0);
    LinearSystem sys = assemble_system(basis, s.collocation, targets, boundary(c, s, d)(0.0));
    apply_rescaling(sys, c.rescale);
    SolveResult r = solve_least_squares(sys, s.advance.solve);
    if (!dump_dir.empty()) dump_system(sys, dump_dir, &r.U);
    FittedField f(basis, std::move(r.U), 0.0);
    if (report != nullptr) {
        *report = relative_errors(f, h, s.test);
        report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return f;
}

ErrorReport run_manufactured(const RunConfig& c) {
    if (c.model != ModelKind::Manufactured) throw ConfigError("run_manufactured needs the manufactured model");
    Setup s = make_setup(c);
    ManufacturedModel model(c.cells, s.quadrature);
    Problem pr{&model, s.partition, s.collocation, initial_condition(c), boundary(c, s, 2), &s.quadrature};
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<FittedField> out = advance(pr, sampled_bases(s.partition, s.basis), s.tableau, s.time, {}, s.advance);
    const double T = s.time.T;
    ErrorReport e = relative_errors(out.back(), [T](Vec2 x, int k) { return exact_value(x, T, k); }, s.test);
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return e;
}

RunConfig with_knob(RunConfig c, const std::string& knob, double v) {
    const auto as_int = [&] {
        if (v != std::round(v) || v < 1) throw ConfigError("knob " + knob + " needs a positive integer");
        return static_cast<int>(v);
    };
    if (knob == "dt") c.dt = v;
    else if (knob == "features") c.features = as_int();
    else if (knob == "partition") c.nx = c.ny = as_int();
    else if (knob == "collocation") c.qx = c.qy = as_int();
    else if (knob == "bound") c.bound = v;
    else if (knob == "seed") c.seed = static_cast<std::uint64_t>(as_int());
    else throw ConfigError("unknown sweep knob '" + knob + "' (dt, features, partition, collocation, bound, seed)");
    c.validate();
    return c;
}

ConvergenceTable run_converge(const RunConfig& c, const std::string& knob, const std::vector<double>& values,
                              int workers) {
    for (double v : values) with_knob(c, knob, v);  // reject bad knobs up front
    return convergence_study(knob, values, [&](double v) { return run_manufactured(with_knob(c, knob, v)); },
                             workers);
}

CellRunResult run_cells(const RunConfig& c, const std::string& out_dir,
                        const std::function<void(const StepInfo&)>& progress) {
    if (c.model != ModelKind::Cells) throw ConfigError("run_cells needs the cell model");
    Setup s = make_setup(c);
    CellModel model(c.cells);
    Problem pr{&model, s.partition, s.collocation, initial_condition(c), boundary(c, s, c.cells.cells),
               &s.quadrature};
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    CellRunResult res;
    res.steps = s.time.K;
    res.min_value = std::numeric_limits<double>::infinity();
    res.max_value = -std::numeric_limits<double>::infinity();
    const int stride = c.stride;
    auto snap = [&](const StepInfo& info) {
        if (progress) progress(info);
        const bool take = info.step == 0 || info.step == s.time.K || (stride > 0 && info.step % stride == 0);
        if (!take) return;
        CellGlobals g;
        const Observables o = observables(*info.field, s.quadrature, c.cells, &g);
        Snapshot sn;
        sn.time = info.t;
        sn.rows = s.quad_grid.ny;
        sn.cols = s.quad_grid.nx;
        sn.values = info.field->eval(s.quadrature.points, kValue);
        if (!sn.values.allFinite())
            throw NumericalError("non-finite field at step " + std::to_string(info.step));
        sn.globals = g;
        sn.observables = o;
        res.min_value = std::min(res.min_value, sn.values.minCoeff());
        res.max_value = std::max(res.max_value, sn.values.maxCoeff());
        res.snapshot_times.push_back(info.t);
        res.snapshot_min.push_back(sn.values.minCoeff());
        res.snapshot_max.push_back(sn.values.maxCoeff());
        res.series.push_back(o);
        res.final_globals = g;
        res.final_observables = o;
        if (!out_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%06d", info.step);
            const auto base = std::filesystem::path(out_dir) / name;
            write_snapshot(base.string() + ".bin", sn);
            if (c.csv) write_snapshot_csv(base.string() + ".csv", sn, s.quad_grid);
        }
    };
    const auto t0 = std::chrono::steady_clock::now();
    advance(pr, sampled_bases(s.partition, s.basis), s.tableau, s.time, {snap}, s.advance);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<SweepCell> run_observable_sweep(const RunConfig& c, const std::vector<double>& zetas,
                                            const std::vector<double>& gammas, int repetitions, int workers) {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (zetas.empty() || gammas.empty()) throw ConfigError("sweep lists must not be empty");
    struct Job {
        std::size_t g, z;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t g = 0; g < gammas.size(); ++g)
        for (std::size_t z = 0; z < zetas.size(); ++z)
            for (int r = 0; r < repetitions; ++r) jobs.push_back({g, z, r});
    struct Outcome {
        bool ok = false;
        std::string message;
        Observables o;
    };
    std::vector<Outcome> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            RunConfig rc = c;
            rc.cells.gamma = gammas[jobs[j].g];
            rc.cells.zeta = zetas[jobs[j].z];
            rc.seed = repetition_seed(c.seed, jobs[j].rep);
            try {
                out[j].o = run_cells(rc).final_observables;
                out[j].ok = true;
            } catch (const std::exception& e) {
                out[j].message = e.what();
            }
        }
    };
    const int nw = std::clamp(workers, 1, static_cast<int>(jobs.size()));
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    auto find = [&](std::size_t g, std::size_t z, int rep) -> const Outcome& {
        return out[(g * zetas.size() + z) * static_cast<std::size_t>(repetitions) + static_cast<std::size_t>(rep)];
    };
    std::optional<std::size_t> z0;
    for (std::size_t z = 0; z < zetas.size(); ++z)
        if (zetas[z] == 0.0) z0 = z;

    std::vector<SweepCell> cells;
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        for (std::size_t z = 0; z < zetas.size(); ++z) {
            SweepCell cell;
            cell.gamma = gammas[g];
            cell.zeta = zetas[z];
            std::vector<double> v, s, ex, sp, cs, co, an;
            for (int r = 0; r < repetitions; ++r) {
                const Outcome& o = find(g, z, r);
                if (!o.ok) {
                    ++cell.failures;
                    cell.message = o.message;
                    continue;
                }
                ++cell.runs;
                v.push_back(o.o.v_rms);
                s.push_back(o.o.s_rms);
                sp.push_back(o.o.mean_speed);
                cs.push_back(o.o.mean_component_speed);
                co.push_back(o.o.mean_component_order);
                an.push_back(o.o.mean_angle);
                if (z0 && find(g, *z0, r).ok) ex.push_back(o.o.s_rms - find(g, *z0, r).o.s_rms);
            }
            cell.v_rms = stat(v);
            cell.s_rms = stat(s);
            cell.s_rms_excess = stat(ex);
            cell.mean_speed = stat(sp);
            cell.mean_component_speed = stat(cs);
            cell.mean_component_order = stat(co);
            cell.mean_angle = stat(an);
            cell.v_rms_samples = v;
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
    os << "gamma,zeta,runs,failures,v_rms,v_rms_std,s_rms,s_rms_std,s_rms_excess,s_rms_excess_std,"
          "mean_speed,mean_speed_std,component_speed,component_speed_std,component_order,component_order_std,"
          "mean_angle,mean_angle_std\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.6e", x);
        return std::string(buf);
    };
    for (const SweepCell& c : cells) {
        os << num(c.gamma) << "," << num(c.zeta) << "," << c.runs << "," << c.failures;
        for (const Stat& s : {c.v_rms, c.s_rms, c.s_rms_excess, c.mean_speed, c.mean_component_speed,
                              c.mean_component_order, c.mean_angle})
            os << "," << num(s.mean) << "," << num(s.std);
        os << "\n";
    }
}

}  // namespace rkrfm
