#pragma once

#include "stoc/types.hpp"

#include <vector>

namespace stoc {

/// Uniform partition of (0, T) into K steps.
template <typename Scalar>
struct TemporalGrid {
    Scalar T{};
    std::size_t K = 0;
    Scalar dt{};

    Scalar node(std::size_t k) const { return static_cast<Scalar>(k) * dt; }
    Scalar midpoint(std::size_t l) const { return (static_cast<Scalar>(l) + Scalar(0.5)) * dt; }
};

template <typename Scalar>
TemporalGrid<Scalar> build_temporal_grid(Scalar T, std::size_t K) {
    if (!(T > Scalar(0)))
        throw std::invalid_argument("build_temporal_grid: final time must be positive");
    if (K == 0)
        throw std::invalid_argument("build_temporal_grid: need at least one time step");
    return {T, K, T / static_cast<Scalar>(K)};
}

/// Trial (hat) vs test (indicator) couplings on the time axis.
///
/// Rows are indexed by hat functions k = 0..K, columns by intervals l = 0..K-1.
/// Indicators are unnormalized, so the interval mass is dt * I.
template <typename Scalar>
struct TemporalMatrices {
    SparseMatrix<Scalar> C;       ///< (d/dt hat_k, chi_l)
    SparseMatrix<Scalar> N;       ///< (hat_k, chi_l)
    SparseMatrix<Scalar> M_time;  ///< (chi_k, chi_l)
    VectorX<Scalar> e_time;       ///< initial-value selector
};

template <typename Scalar>
TemporalMatrices<Scalar> assemble_temporal(const TemporalGrid<Scalar>& grid) {
    const auto K = static_cast<Eigen::Index>(grid.K);
    const Scalar dt = grid.dt;
    // hat_k restricted to interval l is nonzero only for k in {l, l+1};
    // its derivative integrates to hat_k(t_{l+1}) - hat_k(t_l) and the
    // function itself to dt/2.
    std::vector<Eigen::Triplet<Scalar>> c, n, m;
    c.reserve(2 * grid.K);
    n.reserve(2 * grid.K);
    m.reserve(grid.K);
    for (Eigen::Index l = 0; l < K; ++l) {
        c.emplace_back(l, l, Scalar(-1));
        c.emplace_back(l + 1, l, Scalar(1));
        n.emplace_back(l, l, dt / 2);
        n.emplace_back(l + 1, l, dt / 2);
        m.emplace_back(l, l, dt);
    }
    TemporalMatrices<Scalar> out;
    out.C.resize(K + 1, K);
    out.C.setFromTriplets(c.begin(), c.end());
    out.N.resize(K + 1, K);
    out.N.setFromTriplets(n.begin(), n.end());
    out.M_time.resize(K, K);
    out.M_time.setFromTriplets(m.begin(), m.end());
    out.e_time = VectorX<Scalar>::Zero(K + 1);
    out.e_time(0) = Scalar(1);
    return out;
}

}  // namespace stoc
