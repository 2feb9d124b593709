#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stoc {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

/// Spatial point with up to three coordinates, stored inline.
template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Raised when operand sizes disagree (block counts, node counts).
class SizeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration is valid input but not supported by a routine.
class UnsupportedConfiguration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a block that must be SPD fails to factor.
class FactorizationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector of `n_blocks` contiguous blocks of length `block_size`.
///
/// The tag makes states, adjoints and controls distinct types even though
/// they share the layout; block k occupies entries [k*block_size, (k+1)*block_size).
template <typename Scalar, typename Tag>
class BlockVector {
public:
    BlockVector() = default;

    BlockVector(std::size_t n_blocks, std::size_t block_size)
        : n_blocks_(n_blocks), block_size_(block_size),
          data_(VectorX<Scalar>::Zero(static_cast<Eigen::Index>(n_blocks * block_size))) {}

    BlockVector(std::size_t n_blocks, std::size_t block_size, VectorX<Scalar> data)
        : n_blocks_(n_blocks), block_size_(block_size), data_(std::move(data)) {
        if (static_cast<std::size_t>(data_.size()) != n_blocks * block_size)
            throw SizeMismatch("BlockVector: data length does not match block layout");
    }

    static BlockVector constant(std::size_t n_blocks, std::size_t block_size, Scalar value) {
        BlockVector v(n_blocks, block_size);
        v.data_.setConstant(value);
        return v;
    }

    std::size_t n_blocks() const { return n_blocks_; }
    std::size_t block_size() const { return block_size_; }
    Eigen::Index size() const { return data_.size(); }

    auto block(std::size_t k) {
        return data_.segment(static_cast<Eigen::Index>(k * block_size_),
                             static_cast<Eigen::Index>(block_size_));
    }
    auto block(std::size_t k) const {
        return data_.segment(static_cast<Eigen::Index>(k * block_size_),
                             static_cast<Eigen::Index>(block_size_));
    }

    VectorX<Scalar>& data() { return data_; }
    const VectorX<Scalar>& data() const { return data_; }

    bool same_layout(const BlockVector& other) const {
        return n_blocks_ == other.n_blocks_ && block_size_ == other.block_size_;
    }

private:
    std::size_t n_blocks_ = 0;
    std::size_t block_size_ = 0;
    VectorX<Scalar> data_;
};

struct StateTag {};
struct ControlTag {};
struct RhsTag {};
struct AdjointRhsTag {};

/// y^0..y^K, each an n_h nodal vector.
template <typename Scalar>
using StateCoeffs = BlockVector<Scalar, StateTag>;

/// u_0..u_{K-1}: piecewise constant in time, nodal in space.
template <typename Scalar>
using ControlCoeffs = BlockVector<Scalar, ControlTag>;

/// Space-time right-hand side: K test-block rows followed by the initial block.
template <typename Scalar>
using SpaceTimeRhs = BlockVector<Scalar, RhsTag>;

/// Right-hand side of the transposed system, one block per trial function k = 0..K.
template <typename Scalar>
using AdjointRhs = BlockVector<Scalar, AdjointRhsTag>;

/// Space-time adjoint: p1 lives on the K time intervals, p2 is the initial-condition multiplier.
template <typename Scalar>
struct AdjointCoeffs {
    ControlCoeffs<Scalar> p1;
    VectorX<Scalar> p2;
};

}  // namespace stoc
