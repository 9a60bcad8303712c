#include "rkrfm/lstsq.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

#include "rkrfm/error.hpp"

namespace rkrfm {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string("non-finite entries in least-squares ") + what);
}

void check_info(lapack_int info, const char* routine) {
    if (info != 0) throw SolverError(std::string(routine) + " failed with info = " + std::to_string(info));
}

}  // namespace

DenseSolveResult dense_lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rtol) {
    if (a.rows() != b.rows()) throw ConfigError("least-squares right-hand side has the wrong row count");
    require_finite(a, "matrix");
    require_finite(b, "right-hand side");
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int nrhs = static_cast<lapack_int>(b.cols());
    DenseSolveResult out;
    if (m == 0 || n == 0) {
        out.x = Eigen::MatrixXd::Zero(n, nrhs);
        return out;
    }
    Eigen::MatrixXd work = a;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(std::max(m, n), nrhs);
    rhs.topRows(m) = b;
    out.singular_values.resize(std::min(m, n));
    lapack_int rank = 0;
    if (nrhs > 0) {
        const lapack_int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, m, n, nrhs, work.data(), m, rhs.data(),
                                               std::max(m, n), out.singular_values.data(), rtol, &rank);
        check_info(info, "dgelsd");
    }
    out.rank = static_cast<int>(rank);
    out.x = rhs.topRows(n);
    return out;
}

void BlockLeastSquares::factor(const std::vector<Eigen::MatrixXd>& local, const Eigen::MatrixXd& coupling,
                               double rtol) {
    factored_ = false;
    if (local.empty()) throw ConfigError("block least squares needs at least one block");
    block_cols_ = static_cast<int>(local.front().cols());
    const int nblocks = static_cast<int>(local.size());
    if (coupling.rows() > 0 && coupling.cols() != static_cast<Eigen::Index>(nblocks) * block_cols_)
        throw ConfigError("coupling rows have the wrong column count");
    require_finite(coupling, "coupling rows");

    u_.assign(nblocks, {});
    sigma_.assign(nblocks, {});
    v_.assign(nblocks, {});
    offset_.assign(nblocks, 0);
    reduced_cols_ = 0;
    for (int n = 0; n < nblocks; ++n) {
        const Eigen::MatrixXd& ln = local[n];
        if (ln.cols() != block_cols_) throw ConfigError("local blocks differ in column count");
        require_finite(ln, "local rows");
        const lapack_int m = static_cast<lapack_int>(ln.rows());
        const lapack_int c = block_cols_;
        const lapack_int k = std::min(m, c);
        Eigen::MatrixXd work = ln;
        Eigen::MatrixXd u(m, k), vt(k, c);
        Eigen::VectorXd s(k);
        if (k > 0) {
            check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, c, work.data(), std::max<lapack_int>(m, 1), s.data(),
                                      u.data(), std::max<lapack_int>(m, 1), vt.data(), k),
                       "dgesdd");
        }
        int keep = 0;
        const double cutoff = k > 0 ? rtol * s(0) : 0.0;
        while (keep < k && s(keep) > cutoff) ++keep;
        u_[n] = u.leftCols(keep);
        sigma_[n] = s.head(keep);
        v_[n] = vt.topRows(keep).transpose();
        offset_[n] = reduced_cols_;
        reduced_cols_ += keep;
    }
    if (reduced_cols_ == 0) throw SolverError("least-squares system has numerical rank zero");

    coupling_rows_ = static_cast<int>(coupling.rows());
    r_ = Eigen::MatrixXd::Zero(reduced_cols_, reduced_cols_);
    for (int n = 0; n < nblocks; ++n)
        r_.diagonal().segment(offset_[n], sigma_[n].size()) = sigma_[n];
    if (coupling_rows_ > 0) {
        pent_.resize(coupling_rows_, reduced_cols_);
        for (int n = 0; n < nblocks; ++n)
            pent_.middleCols(offset_[n], v_[n].cols()).noalias() =
                coupling.middleCols(static_cast<Eigen::Index>(n) * block_cols_, block_cols_) * v_[n];
        nb_ = std::min(64, reduced_cols_);
        t_.resize(nb_, reduced_cols_);
        check_info(LAPACKE_dtpqrt(LAPACK_COL_MAJOR, coupling_rows_, reduced_cols_, 0, nb_, r_.data(), reduced_cols_,
                                  pent_.data(), coupling_rows_, t_.data(), nb_),
                   "dtpqrt");
    }
    factored_ = true;
}

Eigen::MatrixXd BlockLeastSquares::solve(const std::vector<Eigen::MatrixXd>& local_rhs,
                                         const Eigen::MatrixXd& coupling_rhs) const {
    if (!factored_) throw SolverError("block least squares used before factorization");
    if (local_rhs.size() != v_.size()) throw ConfigError("right-hand side block count mismatch");
    if (coupling_rhs.rows() != coupling_rows_) throw ConfigError("coupling right-hand side row count mismatch");
    const Eigen::Index d = local_rhs.front().cols();
    if (d > 1) {
        // Column at a time, so that each column's result does not depend on its neighbours.
        Eigen::MatrixXd x(static_cast<Eigen::Index>(v_.size()) * block_cols_, d);
        std::vector<Eigen::MatrixXd> local(local_rhs.size());
        for (Eigen::Index c = 0; c < d; ++c) {
            for (std::size_t n = 0; n < local_rhs.size(); ++n) {
                if (local_rhs[n].cols() != d) throw ConfigError("right-hand side block has the wrong shape");
                local[n] = local_rhs[n].col(c);
            }
            x.col(c) = solve(local, coupling_rows_ > 0 ? Eigen::MatrixXd(coupling_rhs.col(c)) : Eigen::MatrixXd(0, 1));
        }
        return x;
    }
    Eigen::MatrixXd top(reduced_cols_, d);
    for (std::size_t n = 0; n < v_.size(); ++n) {
        require_finite(local_rhs[n], "right-hand side");
        if (local_rhs[n].rows() != u_[n].rows() || local_rhs[n].cols() != d)
            throw ConfigError("right-hand side block has the wrong shape");
        top.middleRows(offset_[n], u_[n].cols()).noalias() = u_[n].transpose() * local_rhs[n];
    }
    Eigen::MatrixXd coef;
    if (coupling_rows_ > 0 && d > 0) {
        require_finite(coupling_rhs, "right-hand side");
        Eigen::MatrixXd bottom = coupling_rhs;
        check_info(LAPACKE_dtpmqrt(LAPACK_COL_MAJOR, 'L', 'T', coupling_rows_, static_cast<lapack_int>(d),
                                   reduced_cols_, 0, nb_, pent_.data(), coupling_rows_, t_.data(), nb_, top.data(),
                                   reduced_cols_, bottom.data(), coupling_rows_),
                   "dtpmqrt");
        coef = r_.triangularView<Eigen::Upper>().solve(top);
    } else {
        coef = top;
        for (std::size_t n = 0; n < v_.size(); ++n)
            coef.middleRows(offset_[n], sigma_[n].size()).array().colwise() /= sigma_[n].array();
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(v_.size()) * block_cols_, d);
    for (std::size_t n = 0; n < v_.size(); ++n)
        x.middleRows(static_cast<Eigen::Index>(n) * block_cols_, block_cols_).noalias() =
            v_[n] * coef.middleRows(offset_[n], v_[n].cols());
    return x;
}

std::vector<int> BlockLeastSquares::block_ranks() const {
    std::vector<int> out;
    for (const auto& s : sigma_) out.push_back(static_cast<int>(s.size()));
    return out;
}

}  // namespace rkrfm
