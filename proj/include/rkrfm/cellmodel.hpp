#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rkrfm/assembly.hpp"
#include "rkrfm/geometry.hpp"
#include "rkrfm/integrator.hpp"
#include "rkrfm/jet.hpp"

namespace rkrfm {

struct CellParams {
    double gamma = 0.01;
    double width = 2.5;  ///< interface width lambda
    double mu = 3.0;
    double kappa = 0.1;
    double radius = 8.0;  ///< target radius R
    double xi = 2.0;
    double zeta = 0.005;
    int cells = 1;

    void validate() const;
    double target_area() const;
};

/// Per-cell integrals of one stage state.
struct CellGlobals {
    std::vector<double> area;  ///< A_i = int phi_i^2
    std::vector<double> s11;
    std::vector<double> s12;
    std::vector<Eigen::Vector2d> force;
    std::vector<Eigen::Vector2d> velocity;

    static CellGlobals zero(int cells);
    int cells() const { return static_cast<int>(area.size()); }
};

/// Pressure and nematic fields at the quadrature points.
struct TissueFields {
    Eigen::VectorXd pressure;
    Eigen::VectorXd q11;
    Eigen::VectorXd q12;
};

/// (8 gamma/lambda) phi (1 - phi)(1 - 2 phi) - 2 gamma lambda Lap phi, at order phi.order() - 2.
Jet variation_ch(const Jet& phi, const CellParams& p);
/// -(4 mu / pi R^2) phi (1 - A / pi R^2), at phi's order.
Jet variation_area(const Jet& phi, double area, const CellParams& p);
/// (2 kappa / lambda) sum_{k != i} phi_k^2 phi_i, at the lowest order among the jets.
Jet variation_rep(std::span<const Jet> phi, int i, const CellParams& p);

/// Integrals and tissue fields from stage jets (order >= 2) on a quadrature grid.
CellGlobals cell_globals(std::span<const Jet> phi, std::span<const double> weights, const CellParams& p,
                         TissueFields* fields = nullptr);

/// d_t phi_i = -v_i . grad phi_i - (CH + area + repulsion variations).
class CellModel : public RhsModel {
public:
    explicit CellModel(CellParams params);

    int spatial_order() const override { return 2; }
    int components() const override { return params_.cells; }
    bool needs_globals() const override { return true; }
    void prepare_stage(double t, std::span<const Jet> quad_state, std::span<const double> weights) override;
    std::vector<Jet> evaluate(double t, const PointSet& points, std::span<const Jet> state,
                              int out_order) const override;

    /// The right-hand side with explicit globals.
    std::vector<Jet> rhs(std::span<const Jet> state, const CellGlobals& globals, int out_order) const;

    const CellParams& params() const { return params_; }
    const CellGlobals& globals() const { return globals_; }
    void set_globals(CellGlobals g) { globals_ = std::move(g); }

private:
    CellParams params_;
    CellGlobals globals_;
};

struct Observables {
    double v_rms = 0.0;
    double s_rms = 0.0;
    double mean_speed = 0.0;            ///< <|v|>
    double mean_component_speed = 0.0;  ///< (<v_x>^2 + <v_y>^2)^(1/2)
    double mean_component_order = 0.0;  ///< (<S11>^2 + <S12>^2)^(1/2)
    double mean_angle = 0.0;            ///< <atan2(S12, S11)>
};

/// Observables of the tissue fields v = sum phi_i v_i and S = sum phi_i S_i.
Observables observables(const FittedField& field, const Quadrature& grid, const CellParams& p,
                        CellGlobals* globals_out = nullptr);
/// Same, from cell values on the grid (|grid| x cells) and per-cell globals.
Observables observables(const Eigen::MatrixXd& values, std::span<const double> weights, const CellGlobals& g);

/// (1 + tanh((r - |x - c|) / lambda)) / 2 with the minimum-image distance when periodic.
double disc_profile(Vec2 x, Vec2 center, double r, double width, const DomainBox& domain, bool periodic);

/// Uniform random centers from the seed; with min_separation > 0, rejection sampling
/// (minimum-image distance when periodic) up to a bounded number of attempts.
std::vector<Vec2> random_centers(const DomainBox& domain, int cells, std::uint64_t seed, double min_separation,
                                 bool periodic);

}  // namespace rkrfm
