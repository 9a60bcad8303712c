#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rkrfm/assembly.hpp"
#include "rkrfm/cellmodel.hpp"
#include "rkrfm/geometry.hpp"
#include "rkrfm/integrator.hpp"
#include "rkrfm/jet.hpp"

namespace rkrfm {

/// Cell parameters of the manufactured problem: gamma = mu = kappa = 1e-3, the rest 1.
CellParams manufactured_params();

/// Exact fields phi_1 = sin x sin y e^{-t}, phi_2 = cos x cos y e^{-t} as jets.
std::vector<Jet> exact_solution(const PointSet& points, double t, int order);
double exact_value(Vec2 x, double t, int component);

/// The cell model with the source s = d_t phi^e - F(phi^e), so that phi^e solves
/// d_t phi = F(phi) + s. Globals of phi^e come from the same quadrature grid.
class ManufacturedModel : public RhsModel {
public:
    ManufacturedModel(CellParams params, Quadrature quadrature);

    int spatial_order() const override { return 2; }
    int components() const override { return 2; }
    bool needs_globals() const override { return true; }
    void prepare_stage(double t, std::span<const Jet> quad_state, std::span<const double> weights) override;
    std::vector<Jet> evaluate(double t, const PointSet& points, std::span<const Jet> state,
                              int out_order) const override;

    const CellModel& cell_model() const { return cells_; }
    /// Source jets of order out_order at time t.
    std::vector<Jet> source(double t, const PointSet& points, int out_order) const;
    const Quadrature& quadrature() const { return quad_; }

private:
    CellModel cells_;
    Quadrature quad_;
};

/// Source values (|points| x 2) at time t.
Eigen::MatrixXd manufactured_source(const ManufacturedModel& model, const PointSet& points, double t);

struct ErrorReport {
    double linf = 0.0;
    double l2 = 0.0;
    double seconds = 0.0;
};

/// Relative discrete max and l2 errors over all grid points and components.
ErrorReport relative_errors(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact);
ErrorReport relative_errors(const FittedField& field, const std::function<double(Vec2, int)>& exact,
                            const TestGrid& grid);

/// Least-squares slope of log y against log x; empty for fewer than two distinct x.
std::optional<double> fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
    double value = 0.0;
    ErrorReport errors;
    bool ok = true;
    std::string message;
};

struct ConvergenceTable {
    std::string knob;
    std::vector<SweepRow> rows;
    std::optional<double> slope_linf;
    std::optional<double> slope_l2;

    void write_csv(std::ostream& os) const;
};

/// Runs run(value) for each value, with up to `workers` rows at once. A failing row
/// is recorded and the sweep continues; slopes use the successful rows.
ConvergenceTable convergence_study(const std::string& knob, const std::vector<double>& values,
                                   const std::function<ErrorReport(double)>& run, int workers = 1);

/// Central difference estimate of d^a f at x, composed per axis:
/// sum_k (-1)^k C(n, k) f(x + (n/2 - k) h) / h^n.
template <class Real, class F>
Real fd_oracle(const F& f, Real x, Real y, MultiIndex a, Real h) {
    auto binom = [](int n, int k) {
        Real c = 1;
        for (int i = 1; i <= k; ++i) c = c * Real(n - k + i) / Real(i);
        return c;
    };
    Real sum = 0;
    for (int i = 0; i <= a.ax; ++i) {
        const Real ox = (Real(a.ax) / 2 - i) * h;
        for (int j = 0; j <= a.ay; ++j) {
            const Real oy = (Real(a.ay) / 2 - j) * h;
            const Real sign = ((i + j) % 2 == 0) ? Real(1) : Real(-1);
            sum += sign * binom(a.ax, i) * binom(a.ay, j) * f(x + ox, y + oy);
        }
    }
    Real hp = 1;
    for (int k = 0; k < a.ax + a.ay; ++k) hp *= h;
    return sum / hp;
}

}  // namespace rkrfm
