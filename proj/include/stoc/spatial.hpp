#pragma once

#include "stoc/types.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <functional>
#include <variant>
#include <vector>

namespace stoc {

template <typename Scalar>
struct IntervalMesh {
    Scalar a{};
    Scalar b{};
    std::size_t n_cells = 0;
    Scalar h{};

    std::size_t n_nodes() const { return n_cells + 1; }
    Scalar node(std::size_t i) const {
        return i == n_cells ? b : a + static_cast<Scalar>(i) * h;
    }
};

template <typename Scalar>
IntervalMesh<Scalar> build_interval_mesh(Scalar a, Scalar b, std::size_t n_cells) {
    if (!(a < b))
        throw std::invalid_argument("build_interval_mesh: need a < b");
    if (n_cells == 0)
        throw std::invalid_argument("build_interval_mesh: need at least one cell");
    return {a, b, n_cells, (b - a) / static_cast<Scalar>(n_cells)};
}

namespace detail {

template <typename Scalar>
SparseMatrix<Scalar> tridiagonal(std::size_t n, Scalar diag_interior, Scalar diag_end, Scalar off) {
    std::vector<Eigen::Triplet<Scalar>> t;
    t.reserve(3 * n);
    const auto nn = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < nn; ++i) {
        const bool end = (i == 0 || i == nn - 1);
        t.emplace_back(i, i, end ? diag_end : diag_interior);
        if (i + 1 < nn) {
            t.emplace_back(i, i + 1, off);
            t.emplace_back(i + 1, i, off);
        }
    }
    SparseMatrix<Scalar> m(nn, nn);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace detail

/// Consistent P1 mass matrix.
template <typename Scalar>
SparseMatrix<Scalar> assemble_mass_1d(const IntervalMesh<Scalar>& mesh) {
    const Scalar h = mesh.h;
    return detail::tridiagonal<Scalar>(mesh.n_nodes(), 4 * h / 6, 2 * h / 6, h / 6);
}

/// P1 stiffness matrix without boundary terms (pure Neumann).
template <typename Scalar>
SparseMatrix<Scalar> assemble_stiffness_1d(const IntervalMesh<Scalar>& mesh) {
    const Scalar k = Scalar(1) / mesh.h;
    return detail::tridiagonal<Scalar>(mesh.n_nodes(), 2 * k, k, -k);
}

/// Stiffness plus the Robin boundary mass; in 1d the boundary integral is
/// the evaluation of mu at the two endpoints.
template <typename Scalar, typename MuFn>
SparseMatrix<Scalar> assemble_stiffness_robin_1d(const IntervalMesh<Scalar>& mesh, MuFn&& mu) {
    SparseMatrix<Scalar> A = assemble_stiffness_1d(mesh);
    const auto last = static_cast<Eigen::Index>(mesh.n_cells);
    A.coeffRef(0, 0) += mu(mesh.a);
    A.coeffRef(last, last) += mu(mesh.b);
    return A;
}

template <typename Scalar>
using SpatialFunction = std::function<Scalar(const Point<Scalar>&)>;

/// Boundary coefficient mu: a constant, or (1d only) a function of position.
template <typename Scalar>
using RobinCoefficient = std::variant<Scalar, SpatialFunction<Scalar>>;

/// Per-axis building blocks handed to tensorize().
template <typename Scalar>
struct AxisOperators {
    IntervalMesh<Scalar> mesh;
    SparseMatrix<Scalar> mass;
    SparseMatrix<Scalar> stiffness;  ///< interior part, no boundary terms
};

template <typename Scalar>
AxisOperators<Scalar> make_axis(const IntervalMesh<Scalar>& mesh) {
    return {mesh, assemble_mass_1d(mesh), assemble_stiffness_1d(mesh)};
}

/// Nodal P1 (1d) / Q1 (2d, 3d) space on a tensor-product box.
///
/// Node index i = ((i_0 * n_1) + i_1) * n_2 + i_2, i.e. axis 0 varies slowest,
/// matching the Kronecker ordering M_0 (x) M_1 (x) M_2.
template <typename Scalar>
struct SpatialDiscretization {
    std::size_t dim = 0;
    std::vector<IntervalMesh<Scalar>> axes;
    std::size_t n_h = 0;
    SparseMatrix<Scalar> M;
    SparseMatrix<Scalar> A;
    /// Lumped boundary quadrature weight of each node (0 for interior nodes).
    VectorX<Scalar> boundary_weights;

    /// Multi-index of node i, one entry per axis.
    std::vector<std::size_t> multi_index(std::size_t i) const {
        std::vector<std::size_t> idx(dim);
        for (std::size_t d = dim; d-- > 0;) {
            const std::size_t n = axes[d].n_nodes();
            idx[d] = i % n;
            i /= n;
        }
        return idx;
    }

    Point<Scalar> point(std::size_t i) const {
        Point<Scalar> x(static_cast<Eigen::Index>(dim));
        const auto idx = multi_index(i);
        for (std::size_t d = 0; d < dim; ++d)
            x(static_cast<Eigen::Index>(d)) = axes[d].node(idx[d]);
        return x;
    }

    bool on_boundary(std::size_t i) const { return boundary_weights(static_cast<Eigen::Index>(i)) != Scalar(0); }
};

namespace detail {

template <typename Scalar>
SparseMatrix<Scalar> kron(const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b) {
    SparseMatrix<Scalar> out = Eigen::kroneckerProduct(a, b);
    out.makeCompressed();
    return out;
}

template <typename Scalar>
SparseMatrix<Scalar> endpoint_indicator(std::size_t n) {
    SparseMatrix<Scalar> e(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    e.insert(0, 0) = Scalar(1);
    const auto last = static_cast<Eigen::Index>(n - 1);
    if (last > 0) e.insert(last, last) = Scalar(1);
    return e;
}

/// Kronecker product over all axes, with `special` substituted on axis `which`.
template <typename Scalar>
SparseMatrix<Scalar> kron_with(const std::vector<AxisOperators<Scalar>>& axes, std::size_t which,
                               const SparseMatrix<Scalar>& special) {
    SparseMatrix<Scalar> out = which == 0 ? special : axes[0].mass;
    for (std::size_t d = 1; d < axes.size(); ++d)
        out = kron<Scalar>(out, d == which ? special : axes[d].mass);
    return out;
}

template <typename Scalar>
VectorX<Scalar> row_sums(const SparseMatrix<Scalar>& m) {
    return m * VectorX<Scalar>::Ones(m.cols());
}

}  // namespace detail

/// Assemble M_h and A_h from per-axis factors.
///
/// M_h = (x)_d M_d, A_h = sum_d K_d (x) (masses elsewhere) + Robin term. For
/// dim >= 2 the Robin term is mu * sum_d E_d (x) (masses elsewhere) with E_d the
/// endpoint indicator of axis d, which requires a constant mu.
template <typename Scalar>
SpatialDiscretization<Scalar> tensorize(const std::vector<AxisOperators<Scalar>>& axes,
                                        const RobinCoefficient<Scalar>& mu) {
    if (axes.empty() || axes.size() > 3)
        throw std::invalid_argument("tensorize: dimension must be 1, 2 or 3");
    const bool constant_mu = std::holds_alternative<Scalar>(mu);
    if (axes.size() >= 2 && !constant_mu)
        throw UnsupportedConfiguration("tensorize: position-dependent mu is only supported in 1d");

    SpatialDiscretization<Scalar> s;
    s.dim = axes.size();
    s.n_h = 1;
    for (const auto& ax : axes) {
        s.axes.push_back(ax.mesh);
        s.n_h *= ax.mesh.n_nodes();
    }

    s.M = axes[0].mass;
    for (std::size_t d = 1; d < axes.size(); ++d) s.M = detail::kron<Scalar>(s.M, axes[d].mass);

    // Lumped face weights: a node on an end of axis d gets the product of the
    // lumped masses of its other coordinates, summed over such axes.
    s.boundary_weights = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(s.n_h));
    std::vector<VectorX<Scalar>> lumped;
    for (const auto& ax : axes) lumped.push_back(detail::row_sums(ax.mass));
    for (std::size_t i = 0; i < s.n_h; ++i) {
        const auto idx = s.multi_index(i);
        Scalar w(0);
        for (std::size_t d = 0; d < s.dim; ++d) {
            if (idx[d] != 0 && idx[d] != axes[d].mesh.n_cells) continue;
            Scalar face(1);
            for (std::size_t e = 0; e < s.dim; ++e)
                if (e != d) face *= lumped[e](static_cast<Eigen::Index>(idx[e]));
            w += face;
        }
        s.boundary_weights(static_cast<Eigen::Index>(i)) = w;
    }

    s.A = SparseMatrix<Scalar>(static_cast<Eigen::Index>(s.n_h), static_cast<Eigen::Index>(s.n_h));
    for (std::size_t d = 0; d < axes.size(); ++d) s.A += detail::kron_with(axes, d, axes[d].stiffness);

    if (s.dim == 1) {
        const auto& mesh = axes[0].mesh;
        const auto last = static_cast<Eigen::Index>(mesh.n_cells);
        auto eval = [&](Scalar x) {
            if (constant_mu) return std::get<Scalar>(mu);
            Point<Scalar> p(1);
            p(0) = x;
            return std::get<SpatialFunction<Scalar>>(mu)(p);
        };
        s.A.coeffRef(0, 0) += eval(mesh.a);
        s.A.coeffRef(last, last) += eval(mesh.b);
    } else {
        const Scalar mu_c = std::get<Scalar>(mu);
        for (std::size_t d = 0; d < axes.size(); ++d)
            s.A += mu_c * detail::kron_with(axes, d, detail::endpoint_indicator<Scalar>(axes[d].mesh.n_nodes()));
    }
    s.A.makeCompressed();
    s.M.makeCompressed();
    return s;
}

/// Convenience: uniform tensor grid from per-axis (a, b, n_cells).
template <typename Scalar>
SpatialDiscretization<Scalar> build_spatial(const std::vector<IntervalMesh<Scalar>>& meshes,
                                            const RobinCoefficient<Scalar>& mu) {
    std::vector<AxisOperators<Scalar>> axes;
    axes.reserve(meshes.size());
    for (const auto& m : meshes) axes.push_back(make_axis(m));
    return tensorize(axes, mu);
}

template <typename Scalar, typename Fn>
VectorX<Scalar> interpolate(const SpatialDiscretization<Scalar>& spatial, Fn&& f) {
    VectorX<Scalar> v(static_cast<Eigen::Index>(spatial.n_h));
    for (std::size_t i = 0; i < spatial.n_h; ++i) v(static_cast<Eigen::Index>(i)) = f(spatial.point(i));
    return v;
}

/// Entries int_{t0}^{t1} int_Gamma eta phi_j: trapezoidal rule in time,
/// lumped nodal quadrature on the boundary.
template <typename Scalar, typename EtaFn>
VectorX<Scalar> assemble_boundary_load(const SpatialDiscretization<Scalar>& spatial, EtaFn&& eta,
                                       Scalar t0, Scalar t1) {
    if (!(t0 < t1))
        throw std::invalid_argument("assemble_boundary_load: need t0 < t1");
    VectorX<Scalar> load = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(spatial.n_h));
    const Scalar half = (t1 - t0) / 2;
    for (std::size_t i = 0; i < spatial.n_h; ++i) {
        const Scalar w = spatial.boundary_weights(static_cast<Eigen::Index>(i));
        if (w == Scalar(0)) continue;
        const auto x = spatial.point(i);
        load(static_cast<Eigen::Index>(i)) = w * half * (eta(t0, x) + eta(t1, x));
    }
    return load;
}

}  // namespace stoc
