#include "rkrfm/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <thread>

#include "rkrfm/error.hpp"

namespace rkrfm {

namespace {

/// k-th derivative of sin (cos when shift = 1).
double trig_derivative(double x, int k, int shift) {
    switch ((k + shift) % 4) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}

}  // namespace

CellParams manufactured_params() {
    CellParams p;
    p.gamma = 1e-3;
    p.mu = 1e-3;
    p.kappa = 1e-3;
    p.radius = 1.0;
    p.width = 1.0;
    p.xi = 1.0;
    p.zeta = 1.0;
    p.cells = 2;
    return p;
}

std::vector<Jet> exact_solution(const PointSet& points, double t, int order) {
    std::vector<Jet> out(2, Jet(points.size(), order));
    const double e = std::exp(-t);
    for (int p = 0; p < midx_count(order); ++p) {
        const MultiIndex a = midx_at(p);
        auto v1 = out[0].at(p);
        auto v2 = out[1].at(p);
        for (std::size_t i = 0; i < points.size(); ++i) {
            v1[i] = trig_derivative(points.x[i], a.ax, 0) * trig_derivative(points.y[i], a.ay, 0) * e;
            v2[i] = trig_derivative(points.x[i], a.ax, 1) * trig_derivative(points.y[i], a.ay, 1) * e;
        }
    }
    return out;
}

double exact_value(Vec2 x, double t, int component) {
    const double e = std::exp(-t);
    return component == 0 ? std::sin(x.x) * std::sin(x.y) * e : std::cos(x.x) * std::cos(x.y) * e;
}

ManufacturedModel::ManufacturedModel(CellParams params, Quadrature quadrature)
    : cells_(params), quad_(std::move(quadrature)) {
    if (params.cells != 2) throw ConfigError("the manufactured problem has two components");
}

void ManufacturedModel::prepare_stage(double t, std::span<const Jet> quad_state, std::span<const double> weights) {
    cells_.prepare_stage(t, quad_state, weights);
}

std::vector<Jet> ManufacturedModel::source(double t, const PointSet& points, int out_order) const {
    const std::vector<Jet> eq = exact_solution(quad_.points, t, 2);
    const CellGlobals ge = cell_globals(eq, quad_.weights, cells_.params());
    const std::vector<Jet> ex = exact_solution(points, t, out_order + 2);
    std::vector<Jet> f = cells_.rhs(ex, ge, out_order);
    std::vector<Jet> s;
    s.reserve(2);
    for (int c = 0; c < 2; ++c) {
        // d_t phi^e = -phi^e
        Jet sc(points.size(), out_order);
        sc.add_scaled(ex[c], -1.0);
        sc.add_scaled(f[c], -1.0);
        s.push_back(std::move(sc));
    }
    return s;
}

std::vector<Jet> ManufacturedModel::evaluate(double t, const PointSet& points, std::span<const Jet> state,
                                             int out_order) const {
    std::vector<Jet> f = cells_.rhs(state, cells_.globals(), out_order);
    const std::vector<Jet> s = source(t, points, out_order);
    for (int c = 0; c < 2; ++c) f[c] += s[c];
    return f;
}

Eigen::MatrixXd manufactured_source(const ManufacturedModel& model, const PointSet& points, double t) {
    const std::vector<Jet> s = model.source(t, points, 0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), 2);
    for (int c = 0; c < 2; ++c) std::copy(s[c].values().begin(), s[c].values().end(), out.col(c).data());
    return out;
}

ErrorReport relative_errors(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact) {
    if (approx.rows() != exact.rows() || approx.cols() != exact.cols())
        throw ConfigError("error norms need fields of equal shape");
    const double emax = exact.cwiseAbs().maxCoeff();
    const double e2 = exact.norm();
    if (!(emax > 0.0)) throw ConfigError("exact field is zero on the test grid");
    ErrorReport r;
    r.linf = (approx - exact).cwiseAbs().maxCoeff() / emax;
    r.l2 = (approx - exact).norm() / e2;
    return r;
}

ErrorReport relative_errors(const FittedField& field, const std::function<double(Vec2, int)>& exact,
                            const TestGrid& grid) {
    const Eigen::MatrixXd approx = field.eval(grid.points, kValue);
    Eigen::MatrixXd ex(approx.rows(), approx.cols());
    for (std::size_t i = 0; i < grid.points.size(); ++i)
        for (Eigen::Index c = 0; c < approx.cols(); ++c)
            ex(static_cast<Eigen::Index>(i), c) = exact(grid.points.at(i), static_cast<int>(c));
    return relative_errors(approx, ex);
}

std::optional<double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx <= 1e-300) return std::nullopt;
    return sxy / sxx;
}

void ConvergenceTable::write_csv(std::ostream& os) const {
    os << knob << ",l_inf,l_2,seconds,status\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.15g,%.6e,%.6e,%.3f,", r.value, r.errors.linf, r.errors.l2,
                      r.errors.seconds);
        os << buf << (r.ok ? "ok" : "failed: " + r.message) << "\n";
    }
}

ConvergenceTable convergence_study(const std::string& knob, const std::vector<double>& values,
                                   const std::function<ErrorReport(double)>& run, int workers) {
    ConvergenceTable table;
    table.knob = knob;
    table.rows.resize(values.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            SweepRow& row = table.rows[i];
            row.value = values[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                row.errors = run(values[i]);
            } catch (const std::exception& e) {
                row.ok = false;
                row.message = e.what();
            }
            row.errors.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int nw = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(values.size(), 1)));
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::vector<double> x, yi, y2;
    for (const SweepRow& r : table.rows) {
        if (!r.ok) continue;
        x.push_back(r.value);
        yi.push_back(r.errors.linf);
        y2.push_back(r.errors.l2);
    }
    table.slope_linf = fit_slope(x, yi);
    table.slope_l2 = fit_slope(x, y2);
    return table;
}

}  // namespace rkrfm
