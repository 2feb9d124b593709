#pragma once

#include "stoc/stoc.hpp"

#include <Eigen/Dense>

#include <random>

namespace stoc::test {

using Vec = VectorX<double>;
using Dense = Eigen::MatrixXd;

inline Dense dense(const SparseMatrix<double>& m) { return Dense(m); }

inline Vec random_vector(std::mt19937& rng, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

template <typename Tag>
BlockVector<double, Tag> random_blocks(std::mt19937& rng, std::size_t blocks, std::size_t size, double scale = 1.0) {
    return BlockVector<double, Tag>(blocks, size, random_vector(rng, static_cast<Eigen::Index>(blocks * size), scale));
}

inline double rel_err(const Vec& a, const Vec& b) {
    const double denom = std::max(b.norm(), 1e-300);
    return (a - b).norm() / denom;
}

/// 1d problem on (0, 1) with constant data, small enough for dense checks.
inline ProblemData<double> small_problem(std::size_t n_cells, std::size_t K, double mu = 1.0) {
    ProblemData<double> p;
    p.domain = {{0.0}, {1.0}, {n_cells}};
    p.T = 1.0;
    p.K = K;
    p.mu = mu;
    p.eta = [](double t, const Point<double>& x) { return 0.2 + 0.1 * t * x(0); };
    p.y0 = [](const Point<double>& x) { return 0.1 * x(0); };
    p.yd = [](const Point<double>& x) { return 0.2 + 0.3 * x(0); };
    p.lambda = 0.01;
    p.bounds = {-1e300, 1e300};
    p.u_init = 0.0;
    return p;
}

}  // namespace stoc::test
