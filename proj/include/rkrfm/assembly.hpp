#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "rkrfm/basis.hpp"
#include "rkrfm/geometry.hpp"
#include "rkrfm/jet.hpp"
#include "rkrfm/lstsq.hpp"

namespace rkrfm {

inline constexpr double kDefaultRescale = 100.0;

/// Row blocks in their stacking order.
enum class BlockKind : int { A = 0, Bx, By, C0x, C0y, C1x, C1y };
inline constexpr int kBlockKinds = 7;
const char* block_name(BlockKind b);

/// Coefficients of a group of rows restricted to one subdomain's J columns.
struct Segment {
    int subdomain = 0;
    Eigen::MatrixXd m;
};

/// A run of consecutive rows of one block. Rows touching one subdomain have a
/// single segment; interface and periodic rows have two.
struct RowGroup {
    BlockKind block = BlockKind::A;
    std::vector<Segment> segments;
    Eigen::MatrixXd rhs;    ///< rows x columns
    Eigen::VectorXd scale;  ///< applied row factors (ones until rescaled)

    Eigen::Index rows() const { return rhs.rows(); }
    bool local() const { return segments.size() == 1; }
};

/// The stacked system [A; Bx; By; C0x; C0y; C1x; C1y] U = f, stored by row groups.
class LinearSystem {
public:
    LinearSystem(int subdomains, int features, int columns);

    /// Appends groups; the stable order within each block is preserved and
    /// blocks are kept in stacking order.
    void append(std::vector<RowGroup> groups);

    int subdomains() const { return subdomains_; }
    int features() const { return features_; }
    Eigen::Index cols() const { return static_cast<Eigen::Index>(subdomains_) * features_; }
    int rhs_cols() const { return columns_; }
    Eigen::Index rows() const;
    Eigen::Index rows(BlockKind b) const;
    const std::vector<RowGroup>& groups() const { return groups_; }
    std::vector<RowGroup>& groups() { return groups_; }
    double rescale_constant() const { return rescale_; }
    void set_rescale_constant(double c) { rescale_ = c; }

    Eigen::MatrixXd dense_matrix() const;
    Eigen::MatrixXd dense_rhs() const;
    Eigen::VectorXd row_scales() const;
    /// Frobenius norm of (matrix * U - rhs).
    double residual_norm(const Eigen::MatrixXd& U) const;
    double rhs_norm() const;

private:
    int subdomains_;
    int features_;
    int columns_;
    double rescale_ = 0.0;
    std::vector<RowGroup> groups_;
};

struct BoundaryCondition {
    enum class Kind { DirichletSampled, Periodic };
    Kind kind = Kind::Periodic;
    /// Dirichlet values at boundary_point_indices(), one column per component.
    Eigen::MatrixXd values;

    static BoundaryCondition periodic();
    static BoundaryCondition dirichlet(Eigen::MatrixXd values);
};

/// Collocation indices of the Dirichlet rows in order: left edges of the first
/// subdomain column, right edges of the last column, then per column the bottom
/// and top edges.
std::vector<std::size_t> boundary_point_indices(const Partition& partition, const CollocationSet& collocation);

/// Samples g(point, component) at the boundary rows.
BoundaryCondition dirichlet_from(const Partition& partition, const CollocationSet& collocation,
                                 const std::function<double(Vec2, int)>& g, int components);

/// Rows of d^a(psi_m * phi_mj) at the given points for the subdomains whose
/// weights are non-zero there (just `owner` for the indicator partition).
std::vector<Segment> field_segments(const FeatureBasis& basis, int owner, const PointSet& points, MultiIndex a,
                                    int set = 0);

std::vector<RowGroup> assemble_interior(const FeatureBasis& basis, const CollocationSet& collocation,
                                        const Eigen::MatrixXd& targets, int set = 0);
std::vector<RowGroup> assemble_boundary(const FeatureBasis& basis, const CollocationSet& collocation,
                                        const BoundaryCondition& bc, int columns, int set = 0);
/// C0/C1 interface rows with zero right-hand side. Empty (with a warning) for the sine-blend partition.
std::vector<RowGroup> assemble_continuity(const FeatureBasis& basis, const CollocationSet& collocation, int columns,
                                          int set = 0);

/// Interior, boundary and continuity blocks together (not rescaled).
LinearSystem assemble_system(const FeatureBasis& basis, const CollocationSet& collocation,
                             const Eigen::MatrixXd& targets, const BoundaryCondition& bc, int set = 0);

/// Scales every row and its right-hand side so that the row's max-abs entry equals c.
/// Throws SolverError naming the block and row index for an all-zero row.
void apply_rescaling(LinearSystem& system, double c = kDefaultRescale);

enum class SolverBackend {
    Structured,  ///< per-subdomain SVD reduction + pentagonal QR of the coupling rows
    Dense,       ///< SVD-based dense solve of the materialized matrix
};

struct SolveOptions {
    SolverBackend backend = SolverBackend::Structured;
    double rtol = kDefaultRankTolerance;
};

struct SolveResult {
    Eigen::MatrixXd U;
    double residual = 0.0;      ///< ||matrix U - rhs||_F of the (rescaled) system
    double rhs_norm = 0.0;
    int rank = 0;
};

SolveResult solve_least_squares(const LinearSystem& system, const SolveOptions& options = {});

/// Keeps the factorization of one matrix so that systems sharing it (same basis,
/// same collocation, new right-hand side) are solved without refactoring.
class CachedSolver {
public:
    explicit CachedSolver(SolveOptions options = {}) : options_(options) {}
    void factor(const LinearSystem& system);
    bool factored() const { return factored_; }
    SolveResult solve(const LinearSystem& system) const;

private:
    SolveOptions options_;
    bool factored_ = false;
    bool structured_ = true;
    BlockLeastSquares blocks_;
    Eigen::MatrixXd dense_pinv_;  // dense route: pseudo-inverse applied to new right-hand sides
    int dense_rank_ = 0;
};

/// A multi-component field sum_n psi_n sum_j U[nJ + j, c] phi_nj.
class FittedField {
public:
    FittedField(FeatureBasis basis, Eigen::MatrixXd U, double t);

    const FeatureBasis& basis() const { return basis_; }
    const Partition& partition() const { return basis_.partition(); }
    const Eigen::MatrixXd& coefficients() const { return U_; }
    int components() const { return static_cast<int>(U_.cols()); }
    double time() const { return t_; }

    /// |points| x components values of d^a.
    Eigen::MatrixXd eval(const PointSet& points, MultiIndex a) const;
    /// One jet per component with all derivatives up to `order`.
    std::vector<Jet> eval_jet(const PointSet& points, int order) const;

private:
    FeatureBasis basis_;
    Eigen::MatrixXd U_;
    double t_;
};

Eigen::MatrixXd eval_field(const FittedField& field, const PointSet& points, MultiIndex a);

/// Row-major float64 dump with a (rows, cols) uint64 header.
void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(const std::string& path);
/// Writes matrix.bin, rhs.bin, scales.bin (and U.bin if given) into `directory`.
void dump_system(const LinearSystem& system, const std::string& directory, const Eigen::MatrixXd* U = nullptr);

}  // namespace rkrfm
