#pragma once

#include "stoc/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <variant>

namespace stoc {

/// Function of (t, x), used for the boundary flux and for bounds.
template <typename Scalar>
using SpaceTimeFunction = std::function<Scalar(Scalar, const Point<Scalar>&)>;

/// A bound that is either constant or a function of (t, x).
template <typename Scalar>
using BoundValue = std::variant<Scalar, SpaceTimeFunction<Scalar>>;

template <typename Scalar>
struct BoxBounds {
    BoundValue<Scalar> lower;
    BoundValue<Scalar> upper;
};

/// Axis-aligned box domain, uniform cells per axis.
template <typename Scalar>
struct DomainSpec {
    std::vector<Scalar> lo;
    std::vector<Scalar> hi;
    std::vector<std::size_t> n_cells;

    std::size_t dim() const { return lo.size(); }
};

/// Continuous problem data: state equation, target, regularization and bounds.
template <typename Scalar>
struct ProblemData {
    DomainSpec<Scalar> domain;
    Scalar T{1};
    std::size_t K = 1;
    RobinCoefficient<Scalar> mu = Scalar(1);
    SpaceTimeFunction<Scalar> eta;
    SpatialFunction<Scalar> y0;
    SpatialFunction<Scalar> yd;
    Scalar lambda{};
    BoxBounds<Scalar> bounds;
    BoundValue<Scalar> u_init = Scalar(0);
};

namespace detail {

template <typename Scalar>
Scalar evaluate(const BoundValue<Scalar>& b, Scalar t, const Point<Scalar>& x) {
    if (const Scalar* c = std::get_if<Scalar>(&b)) return *c;
    return std::get<SpaceTimeFunction<Scalar>>(b)(t, x);
}

/// Sample a (t, x) function at (interval midpoint, node) for every control coefficient.
template <typename Scalar>
ControlCoeffs<Scalar> sample_on_control_grid(const BoundValue<Scalar>& f, const TemporalGrid<Scalar>& grid,
                                             const SpatialDiscretization<Scalar>& spatial) {
    ControlCoeffs<Scalar> out(grid.K, spatial.n_h);
    if (const Scalar* c = std::get_if<Scalar>(&f)) {
        out.data().setConstant(*c);
        return out;
    }
    for (std::size_t i = 0; i < spatial.n_h; ++i) {
        const auto x = spatial.point(i);
        for (std::size_t l = 0; l < grid.K; ++l)
            out.block(l)(static_cast<Eigen::Index>(i)) = evaluate(f, grid.midpoint(l), x);
    }
    return out;
}

}  // namespace detail

/// Bounds resolved to one (lower, upper) pair per control coefficient.
template <typename Scalar>
struct DiscreteBounds {
    ControlCoeffs<Scalar> lower;
    ControlCoeffs<Scalar> upper;
};

/// Everything assembled once per (problem, n_cells, K): spaces, operator,
/// interpolated data and the time-integrated boundary loads.
template <typename Scalar>
struct DiscreteProblem {
    TemporalGrid<Scalar> grid;
    SpatialDiscretization<Scalar> spatial;
    SpaceTimeOperator<Scalar> op;
    VectorX<Scalar> y0;
    VectorX<Scalar> yd;
    /// eta-load per time interval, trapezoidal in time.
    ControlCoeffs<Scalar> eta_load;
    Scalar lambda;
    DiscreteBounds<Scalar> bounds;
    ControlCoeffs<Scalar> u_init;

    std::size_t K() const { return grid.K; }
    std::size_t n_h() const { return spatial.n_h; }
};

template <typename Scalar>
DiscreteProblem<Scalar> discretize(const ProblemData<Scalar>& data) {
    const auto& dom = data.domain;
    if (dom.dim() == 0 || dom.hi.size() != dom.dim() || dom.n_cells.size() != dom.dim())
        throw std::invalid_argument("discretize: inconsistent domain specification");
    if (!(data.lambda > Scalar(0)))
        throw std::invalid_argument("discretize: regularization lambda must be positive");

    auto grid = build_temporal_grid(data.T, data.K);
    std::vector<IntervalMesh<Scalar>> meshes;
    for (std::size_t d = 0; d < dom.dim(); ++d) meshes.push_back(build_interval_mesh(dom.lo[d], dom.hi[d], dom.n_cells[d]));
    auto spatial = build_spatial(meshes, data.mu);
    auto op = assemble_operator(grid, spatial);

    ControlCoeffs<Scalar> eta_load(grid.K, spatial.n_h);
    for (std::size_t l = 0; l < grid.K; ++l)
        eta_load.block(l) = assemble_boundary_load(spatial, data.eta, grid.node(l), grid.node(l + 1));

    DiscreteBounds<Scalar> bounds{detail::sample_on_control_grid(data.bounds.lower, grid, spatial),
                                  detail::sample_on_control_grid(data.bounds.upper, grid, spatial)};
    if (((bounds.upper.data() - bounds.lower.data()).array() <= Scalar(0)).any())
        throw std::invalid_argument("discretize: lower bound must be strictly below upper bound");

    auto u_init = detail::sample_on_control_grid(data.u_init, grid, spatial);
    VectorX<Scalar> y0 = interpolate(spatial, data.y0);
    VectorX<Scalar> yd = interpolate(spatial, data.yd);

    return DiscreteProblem<Scalar>{grid,          std::move(spatial), std::move(op),     std::move(y0),
                                   std::move(yd), std::move(eta_load), data.lambda,      std::move(bounds),
                                   std::move(u_init)};
}

/// Discrete L2(I; L2(Omega)) inner product of two controls: dt * sum_l a_l^T M_h b_l.
template <typename Scalar>
Scalar weighted_inner(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& a,
                      const ControlCoeffs<Scalar>& b) {
    if (!a.same_layout(b)) throw SizeMismatch("weighted_inner: layouts differ");
    const auto& M = dp.spatial.M;
    Scalar s(0);
    for (std::size_t l = 0; l < a.n_blocks(); ++l) s += a.block(l).dot(M * b.block(l));
    return dp.grid.dt * s;
}

template <typename Scalar>
Scalar weighted_norm(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& a) {
    return std::sqrt(std::max(Scalar(0), weighted_inner(dp, a, a)));
}

/// f(u): block l = dt M_h u_l + eta-load on (t_l, t_{l+1}); last block = M_h y0.
template <typename Scalar>
SpaceTimeRhs<Scalar> build_rhs(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& u) {
    if (u.n_blocks() != dp.K() || u.block_size() != dp.n_h()) throw SizeMismatch("build_rhs: control layout");
    SpaceTimeRhs<Scalar> f(dp.K() + 1, dp.n_h());
    const auto& M = dp.spatial.M;
    for (std::size_t l = 0; l < dp.K(); ++l) f.block(l) = dp.grid.dt * (M * u.block(l)) + dp.eta_load.block(l);
    f.block(dp.K()) = M * dp.y0;
    return f;
}

/// Pointwise cut-off onto [lower, upper].
template <typename Scalar>
ControlCoeffs<Scalar> project(const ControlCoeffs<Scalar>& u, const DiscreteBounds<Scalar>& bounds) {
    if (!u.same_layout(bounds.lower)) throw SizeMismatch("project: control layout");
    ControlCoeffs<Scalar> out = u;
    out.data() = u.data().cwiseMax(bounds.lower.data()).cwiseMin(bounds.upper.data());
    return out;
}

template <typename Scalar>
struct ObjectiveTerms {
    Scalar misfit{};          ///< 1/2 |y(T) - y_d|^2_{L2}
    Scalar regularization{};  ///< lambda/2 |u|^2_{L2(I;L2)}
    Scalar total() const { return misfit + regularization; }
};

template <typename Scalar>
ObjectiveTerms<Scalar> objective_terms(const DiscreteProblem<Scalar>& dp, const StateCoeffs<Scalar>& y,
                                       const ControlCoeffs<Scalar>& u) {
    if (y.n_blocks() != dp.K() + 1 || y.block_size() != dp.n_h()) throw SizeMismatch("objective: state layout");
    // The terminal hat function equals 1 at T, so y(T) is just the last block.
    const VectorX<Scalar> r = y.block(dp.K()) - dp.yd;
    return {Scalar(0.5) * r.dot(dp.spatial.M * r), Scalar(0.5) * dp.lambda * weighted_inner(dp, u, u)};
}

template <typename Scalar>
Scalar objective(const DiscreteProblem<Scalar>& dp, const StateCoeffs<Scalar>& y, const ControlCoeffs<Scalar>& u) {
    return objective_terms(dp, y, u).total();
}

/// g = (0, ..., 0, M_h (y^K - y_d)), ordered by trial function k = 0..K.
template <typename Scalar>
AdjointRhs<Scalar> adjoint_rhs(const DiscreteProblem<Scalar>& dp, const StateCoeffs<Scalar>& y) {
    if (y.n_blocks() != dp.K() + 1 || y.block_size() != dp.n_h()) throw SizeMismatch("adjoint_rhs: state layout");
    AdjointRhs<Scalar> g(dp.K() + 1, dp.n_h());
    g.block(dp.K()) = dp.spatial.M * (y.block(dp.K()) - dp.yd);
    return g;
}

/// lambda u + p1, coefficientwise. Control and adjoint share the spatial
/// basis, so this is the Riesz representative in the weighted inner product.
template <typename Scalar>
ControlCoeffs<Scalar> reduced_gradient(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& u,
                                       const ControlCoeffs<Scalar>& p1) {
    if (!u.same_layout(p1)) throw SizeMismatch("reduced_gradient: control and adjoint layouts differ");
    ControlCoeffs<Scalar> g = u;
    g.data() = dp.lambda * u.data() + p1.data();
    return g;
}

template <typename Scalar>
struct KktDiagnostics {
    Scalar projected_gradient_norm{};    ///< |u - P(u - g)|_w
    Scalar complementarity_violation{};  ///< max_i min(|g_i|, distance of u_i to the nearer bound)
    Scalar feasibility_violation{};      ///< max_i bound violation
};

template <typename Scalar>
KktDiagnostics<Scalar> kkt_residual(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& u,
                                    const ControlCoeffs<Scalar>& g, const DiscreteBounds<Scalar>& bounds) {
    if (!u.same_layout(g)) throw SizeMismatch("kkt_residual: layouts differ");
    KktDiagnostics<Scalar> d;
    ControlCoeffs<Scalar> step = u;
    step.data() -= g.data();
    ControlCoeffs<Scalar> r = u;
    r.data() -= project(step, bounds).data();
    d.projected_gradient_norm = weighted_norm(dp, r);

    const auto& lo = bounds.lower.data();
    const auto& hi = bounds.upper.data();
    const auto& x = u.data();
    d.feasibility_violation = std::max({Scalar(0), (lo - x).maxCoeff(), (x - hi).maxCoeff()});
    const auto gap = (x - lo).cwiseMin(hi - x).cwiseMax(Scalar(0));
    d.complementarity_violation = gap.cwiseMin(g.data().cwiseAbs()).maxCoeff();
    return d;
}

}  // namespace stoc
