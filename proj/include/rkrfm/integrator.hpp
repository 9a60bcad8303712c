#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rkrfm/assembly.hpp"
#include "rkrfm/basis.hpp"
#include "rkrfm/geometry.hpp"
#include "rkrfm/jet.hpp"

namespace rkrfm {

/// Explicit Butcher tableau with strictly lower-triangular a.
struct RKTableau {
    std::string name;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;

    int stages() const { return static_cast<int>(b.size()); }
    void validate() const;

    static RKTableau heun();
    static RKTableau midpoint();
    /// Kutta's third-order method.
    static RKTableau kutta3();
};

RKTableau tableau_by_name(const std::string& name);

struct TimeGrid {
    double T = 0.0;
    int K = 0;

    TimeGrid() = default;
    TimeGrid(double final_time, int steps);
    /// K = round(T / dt); dt must divide T to 1e-9 relative.
    static TimeGrid from_step(double final_time, double dt);

    double dt() const { return K == 0 ? 0.0 : T / K; }
    double time(int k) const { return k == K ? T : k * dt(); }
};

/// Quadrature points and weights for global integrals of the stage state.
struct Quadrature {
    PointSet points;
    std::vector<double> weights;

    static Quadrature from(const TestGrid& grid);
};

/// Right-hand side F(x, t, phi) of d_t phi = F.
///
/// evaluate() maps state jets of order r + m to RHS jets of order r. Models that
/// depend on integrals of the state get the stage state on the quadrature points
/// through prepare_stage() before each evaluate().
class RhsModel {
public:
    virtual ~RhsModel() = default;

    virtual int spatial_order() const = 0;
    virtual int components() const = 0;
    virtual bool needs_globals() const { return false; }
    /// State jets on the quadrature points, of order at least spatial_order().
    virtual void prepare_stage(double t, std::span<const Jet> quad_state, std::span<const double> weights);
    virtual std::vector<Jet> evaluate(double t, const PointSet& points, std::span<const Jet> state,
                                      int out_order) const = 0;
};

/// Highest state derivative order rk_target needs: m * p.
int required_order(const RhsModel& model, const RKTableau& tableau);

/// phi(t_k) + dt sum_i b_i D_i at the collocation points (|points| x components).
/// Throws ConfigError if m * p exceeds the derivative cap, before any evaluation.
Eigen::MatrixXd rk_target(RhsModel& model, const FittedField& field, const RKTableau& tableau, double t, double dt,
                          const PointSet& collocation, const Quadrature* quadrature = nullptr);

using BasisFactory = std::function<FeatureBasis(std::uint64_t step)>;

struct BasisConfig {
    int features = 200;
    double bound = 1.7;
    Activation activation = Activation::Tanh;
    std::uint64_t seed = 0;
    bool regenerate = true;
    int parameter_sets = 1;
};

/// Fresh basis per step from (seed, step), or the step-0 basis throughout.
BasisFactory sampled_bases(const Partition& partition, const BasisConfig& config);

struct StepInfo {
    int step = 0;
    double t = 0.0;
    const FittedField* field = nullptr;
    double residual = 0.0;
    double seconds = 0.0;
};

using StepSink = std::function<void(const StepInfo&)>;

struct Problem {
    RhsModel* model = nullptr;
    Partition partition;
    CollocationSet collocation;
    std::function<double(Vec2, int)> initial;
    /// Boundary condition for the fit at time t.
    std::function<BoundaryCondition(double t)> boundary;
    const Quadrature* quadrature = nullptr;
};

/// Periodic boundaries at every time.
std::function<BoundaryCondition(double)> periodic_boundary();
/// Dirichlet data sampled from g(x, t, component) at the boundary collocation points.
std::function<BoundaryCondition(double)> dirichlet_boundary(const Partition& partition,
                                                            const CollocationSet& collocation,
                                                            std::function<double(Vec2, double, int)> g,
                                                            int components);

enum class History { All, Final };

struct AdvanceOptions {
    double rescale = kDefaultRescale;
    SolveOptions solve;
    History history = History::All;
    /// Reuse one factorization for all steps; only valid with a fixed basis.
    bool cache_factorization = false;
};

/// Fits the initial condition at t = 0 and takes grid.K steps.
std::vector<FittedField> advance(Problem& problem, const BasisFactory& bases, const RKTableau& tableau,
                                 const TimeGrid& grid, const std::vector<StepSink>& sinks = {},
                                 const AdvanceOptions& options = {});

}  // namespace rkrfm
