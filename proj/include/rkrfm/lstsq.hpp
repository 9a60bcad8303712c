#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rkrfm {

inline constexpr double kDefaultRankTolerance = 1e-12;

struct DenseSolveResult {
    Eigen::MatrixXd x;
    int rank = 0;
    Eigen::VectorXd singular_values;
};

/// Minimum-norm least-squares solution of min ||A X - B||_F via an SVD
/// (LAPACK dgelsd). Singular values below rtol * sigma_max are treated as zero.
DenseSolveResult dense_lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rtol = kDefaultRankTolerance);

/// Least squares for matrices made of subdomain-local rows plus coupling rows.
///
/// Unknowns are grouped into blocks of `block_cols` columns. Local rows touch a
/// single block; coupling rows may touch any blocks. Each block's local rows are
/// reduced by a thin SVD with truncation at rtol * sigma_max of that block, the
/// unknowns are reparametrized in the retained right singular vectors, and the
/// resulting [diag(sigma); coupling * V] system is solved by a
/// triangular-pentagonal QR. The factorization is kept, so new right-hand sides
/// with the same matrix cost only triangular solves.
class BlockLeastSquares {
public:
    BlockLeastSquares() = default;

    /// local[n]: rows of block n (m_n x block_cols). coupling: rows x (blocks * block_cols).
    void factor(const std::vector<Eigen::MatrixXd>& local, const Eigen::MatrixXd& coupling,
                double rtol = kDefaultRankTolerance);
    bool factored() const { return factored_; }

    /// local_rhs[n]: m_n x d, coupling_rhs: rows x d. Returns (blocks * block_cols) x d.
    Eigen::MatrixXd solve(const std::vector<Eigen::MatrixXd>& local_rhs, const Eigen::MatrixXd& coupling_rhs) const;

    int blocks() const { return static_cast<int>(v_.size()); }
    int block_cols() const { return block_cols_; }
    /// Total retained rank after the per-block truncation.
    int reduced_rank() const { return reduced_cols_; }
    std::vector<int> block_ranks() const;

private:
    bool factored_ = false;
    int block_cols_ = 0;
    int reduced_cols_ = 0;
    std::vector<Eigen::MatrixXd> u_;      // retained left singular vectors per block
    std::vector<Eigen::VectorXd> sigma_;  // retained singular values
    std::vector<Eigen::MatrixXd> v_;      // retained right singular vectors
    std::vector<int> offset_;             // reduced column offset per block
    Eigen::MatrixXd r_;                   // upper triangular factor (reduced_cols x reduced_cols)
    Eigen::MatrixXd pent_;                // Householder vectors of the pentagonal part
    Eigen::MatrixXd t_;                   // block reflector factors
    int nb_ = 0;
    int coupling_rows_ = 0;
};

}  // namespace rkrfm
