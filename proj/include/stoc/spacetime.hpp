#pragma once

#include "stoc/spatial.hpp"
#include "stoc/temporal.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace stoc {

/// Factored SPD block shared between copies of an operator.
template <typename Scalar>
class SpdFactor {
public:
    explicit SpdFactor(const SparseMatrix<Scalar>& m, const char* what) : llt_(m) {
        if (llt_.info() != Eigen::Success)
            throw FactorizationFailure(std::string("SPD factorization failed for ") + what);
    }

    template <typename Rhs>
    VectorX<Scalar> solve(const Rhs& b) const {
        VectorX<Scalar> x = llt_.solve(b);
        return x;
    }

private:
    Eigen::SimplicialLLT<SparseMatrix<Scalar>> llt_;
};

/// The space-time Petrov-Galerkin matrix
///
///     [ C (x) M_h + N (x) A_h ]
///     [     e^T (x) M_h       ]
///
/// kept in block form: block row l couples y^l and y^{l+1} through
/// lower = -M_h + dt/2 A_h and upper = M_h + dt/2 A_h, and the last row is M_h y^0.
/// The system is block lower bidiagonal, so forward and transpose solves are
/// block substitutions with a single factorization of `upper` (and one of M_h).
template <typename Scalar>
class SpaceTimeOperator {
public:
    SpaceTimeOperator(const TemporalGrid<Scalar>& grid, const SpatialDiscretization<Scalar>& spatial)
        : grid_(grid), n_h_(spatial.n_h), mass_(spatial.M), stiffness_(spatial.A) {
        const Scalar half = grid.dt / 2;
        lower_ = (-mass_ + half * stiffness_).pruned();
        upper_ = (mass_ + half * stiffness_).pruned();
        upper_factor_ = std::make_shared<const SpdFactor<Scalar>>(upper_, "M_h + dt/2 A_h");
        mass_factor_ = std::make_shared<const SpdFactor<Scalar>>(mass_, "M_h");
    }

    const TemporalGrid<Scalar>& grid() const { return grid_; }
    std::size_t K() const { return grid_.K; }
    std::size_t n_h() const { return n_h_; }
    std::size_t n_delta() const { return (grid_.K + 1) * n_h_; }

    const SparseMatrix<Scalar>& lower_block() const { return lower_; }
    const SparseMatrix<Scalar>& upper_block() const { return upper_; }
    const SparseMatrix<Scalar>& mass() const { return mass_; }
    const SparseMatrix<Scalar>& stiffness() const { return stiffness_; }
    const SpdFactor<Scalar>& upper_factor() const { return *upper_factor_; }
    const SpdFactor<Scalar>& mass_factor() const { return *mass_factor_; }

    SpaceTimeRhs<Scalar> apply(const StateCoeffs<Scalar>& y) const {
        check_layout(y.n_blocks(), y.block_size(), "apply");
        SpaceTimeRhs<Scalar> r(K() + 1, n_h_);
        for (std::size_t l = 0; l < K(); ++l) r.block(l) = lower_ * y.block(l) + upper_ * y.block(l + 1);
        r.block(K()) = mass_ * y.block(0);
        return r;
    }

    AdjointRhs<Scalar> apply_transpose(const AdjointCoeffs<Scalar>& p) const {
        check_layout(p.p1.n_blocks() + 1, p.p1.block_size(), "apply_transpose");
        // lower, upper and M_h are symmetric, so the transposed blocks are the blocks themselves.
        AdjointRhs<Scalar> g(K() + 1, n_h_);
        g.block(0) = lower_ * p.p1.block(0) + mass_ * p.p2;
        for (std::size_t k = 1; k < K(); ++k) g.block(k) = upper_ * p.p1.block(k - 1) + lower_ * p.p1.block(k);
        g.block(K()) = upper_ * p.p1.block(K() - 1);
        return g;
    }

    /// Block forward substitution; equivalent to Crank-Nicolson stepping.
    StateCoeffs<Scalar> solve_forward(const SpaceTimeRhs<Scalar>& f) const {
        check_layout(f.n_blocks(), f.block_size(), "solve_forward");
        StateCoeffs<Scalar> y(K() + 1, n_h_);
        y.block(0) = mass_factor_->solve(f.block(K()));
        for (std::size_t l = 0; l < K(); ++l)
            y.block(l + 1) = upper_factor_->solve(f.block(l) - lower_ * y.block(l));
        return y;
    }

    /// Block backward substitution for B^T p = g.
    AdjointCoeffs<Scalar> solve_transpose(const AdjointRhs<Scalar>& g) const {
        check_layout(g.n_blocks(), g.block_size(), "solve_transpose");
        AdjointCoeffs<Scalar> p{ControlCoeffs<Scalar>(K(), n_h_), VectorX<Scalar>()};
        p.p1.block(K() - 1) = upper_factor_->solve(g.block(K()));
        for (std::size_t k = K() - 1; k >= 1; --k)
            p.p1.block(k - 1) = upper_factor_->solve(g.block(k) - lower_ * p.p1.block(k));
        p.p2 = mass_factor_->solve(g.block(0) - lower_ * p.p1.block(0));
        return p;
    }

    /// Explicit sparse B_delta, rows (test blocks l = 0..K-1, initial block),
    /// columns (y^0..y^K). Intended for verification at small sizes.
    SparseMatrix<Scalar> assemble_sparse_oracle(std::size_t max_nonzeros = 100000) const {
        const std::size_t nnz = K() * (lower_.nonZeros() + upper_.nonZeros()) + mass_.nonZeros();
        if (nnz > max_nonzeros)
            throw std::length_error("assemble_sparse_oracle: nonzero count exceeds cap");
        std::vector<Eigen::Triplet<Scalar>> t;
        t.reserve(nnz);
        const auto nh = static_cast<Eigen::Index>(n_h_);
        auto put = [&](const SparseMatrix<Scalar>& blk, Eigen::Index row0, Eigen::Index col0) {
            for (Eigen::Index c = 0; c < blk.outerSize(); ++c)
                for (typename SparseMatrix<Scalar>::InnerIterator it(blk, c); it; ++it)
                    t.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
        };
        for (std::size_t l = 0; l < K(); ++l) {
            const auto row0 = static_cast<Eigen::Index>(l) * nh;
            put(lower_, row0, row0);
            put(upper_, row0, row0 + nh);
        }
        put(mass_, static_cast<Eigen::Index>(K()) * nh, 0);
        const auto n = static_cast<Eigen::Index>(n_delta());
        SparseMatrix<Scalar> B(n, n);
        B.setFromTriplets(t.begin(), t.end());
        return B;
    }

private:
    void check_layout(std::size_t blocks, std::size_t size, const char* where) const {
        if (blocks != K() + 1 || size != n_h_)
            throw SizeMismatch(std::string(where) + ": vector layout does not match operator");
    }

    TemporalGrid<Scalar> grid_;
    std::size_t n_h_;
    SparseMatrix<Scalar> mass_;
    SparseMatrix<Scalar> stiffness_;
    SparseMatrix<Scalar> lower_;
    SparseMatrix<Scalar> upper_;
    std::shared_ptr<const SpdFactor<Scalar>> upper_factor_;
    std::shared_ptr<const SpdFactor<Scalar>> mass_factor_;
};

template <typename Scalar>
SpaceTimeOperator<Scalar> assemble_operator(const TemporalGrid<Scalar>& grid,
                                            const SpatialDiscretization<Scalar>& spatial) {
    return SpaceTimeOperator<Scalar>(grid, spatial);
}

}  // namespace stoc
