#include "helpers.hpp"
#include "stoc/bench/cases.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace stoc;
using stoc::test::Dense;
using stoc::test::Vec;

namespace {

double reduced_objective(const DiscreteProblem<double>& dp, const ControlCoeffs<double>& u) {
    return objective(dp, dp.op.solve_forward(build_rhs(dp, u)), u);
}

ControlCoeffs<double> gradient_at(const DiscreteProblem<double>& dp, const ControlCoeffs<double>& u) {
    const SpaceTimeBackend<double> be(dp);
    return reduced_gradient(dp, u, be.solve_adjoint(be.solve_state(u)));
}

ControlCoeffs<double> add(const ControlCoeffs<double>& a, double s, const ControlCoeffs<double>& b) {
    ControlCoeffs<double> out = a;
    out.data() += s * b.data();
    return out;
}

}  // namespace

TEST_CASE("build_rhs") {
    auto data = stoc::test::small_problem(4, 3);
    data.eta = [](double, const Point<double>&) { return 0.0; };
    data.y0 = [](const Point<double>&) { return 0.0; };
    const auto dp = discretize(data);
    CHECK(build_rhs(dp, ControlCoeffs<double>(3, 5)).data().norm() == 0.0);

    // Unit control on a single (interval, node) pair gives a column of dt M_h.
    ControlCoeffs<double> e(3, 5);
    e.block(1)(2) = 1.0;
    const auto f = build_rhs(dp, e);
    CHECK((f.block(1) - dp.grid.dt * Dense(dp.spatial.M).col(2)).norm() < 1e-15);
    CHECK(f.block(0).norm() + f.block(2).norm() + f.block(3).norm() == 0.0);

    CHECK_THROWS_AS(build_rhs(dp, ControlCoeffs<double>(2, 5)), SizeMismatch);
}

TEST_CASE("build_rhs on case-1 data") {
    const auto dp = discretize(stoc::bench::find_case("case1").make(2, 4));
    REQUIRE(dp.grid.dt == doctest::Approx(0.25));
    const auto u = ControlCoeffs<double>::constant(4, 3, -0.1);
    const auto f = build_rhs(dp, u);
    Vec endpoints(3);
    endpoints << 1, 0, 1;
    const Vec expected = 0.25 * (dp.spatial.M * Vec::Constant(3, -0.1)) + 0.2 * 0.25 * endpoints;
    for (std::size_t l = 0; l < 4; ++l) CHECK((f.block(l) - expected).norm() < 1e-15);
    CHECK(f.block(4).norm() == 0.0);
}

TEST_CASE("projection") {
    auto data = stoc::test::small_problem(2, 2);
    data.bounds = {-0.1, 0.1};
    const auto dp = discretize(data);
    auto u = ControlCoeffs<double>::constant(2, 3, 0.05);
    u.block(0)(0) = 0.25;
    u.block(1)(2) = -7.0;
    const auto pu = project(u, dp.bounds);
    CHECK(pu.block(0)(0) == 0.1);
    CHECK(pu.block(1)(2) == -0.1);
    CHECK(pu.block(0)(1) == 0.05);
    CHECK((project(pu, dp.bounds).data() - pu.data()).norm() == 0.0);

    auto d2 = stoc::test::small_problem(2, 2);
    d2.bounds = {-30.0, 30.0};
    const auto dp2 = discretize(d2);
    CHECK(project(ControlCoeffs<double>::constant(2, 3, -45.0), dp2.bounds).block(0)(1) == -30.0);
}

TEST_CASE("projection is idempotent and non-expansive") {
    auto data = stoc::test::small_problem(6, 5);
    data.bounds = {BoundValue<double>(-0.2), BoundValue<double>(SpaceTimeFunction<double>(
                                                  [](double t, const Point<double>& x) { return 0.1 + t * x(0); }))};
    const auto dp = discretize(data);
    std::mt19937 rng(11);
    for (int r = 0; r < 50; ++r) {
        const auto u = stoc::test::random_blocks<ControlTag>(rng, 5, 7, 0.5);
        const auto v = stoc::test::random_blocks<ControlTag>(rng, 5, 7, 0.5);
        const auto pu = project(u, dp.bounds), pv = project(v, dp.bounds);
        CHECK((project(pu, dp.bounds).data() - pu.data()).norm() == 0.0);
        CHECK(weighted_norm(dp, add(pu, -1.0, pv)) <= weighted_norm(dp, add(u, -1.0, v)) + 1e-15);
    }
}

TEST_CASE("function bounds are sampled at interval midpoints") {
    auto data = stoc::test::small_problem(2, 4);
    data.bounds = {BoundValue<double>(SpaceTimeFunction<double>([](double t, const Point<double>&) { return t - 5; })),
                   BoundValue<double>(10.0)};
    const auto dp = discretize(data);
    CHECK(dp.bounds.lower.block(0)(0) == doctest::Approx(0.125 - 5));
    CHECK(dp.bounds.lower.block(3)(2) == doctest::Approx(0.875 - 5));

    data.bounds = {1.0, 1.0};
    CHECK_THROWS_AS(discretize(data), std::invalid_argument);
    data.bounds = {0.0, 1.0};
    data.lambda = 0.0;
    CHECK_THROWS_AS(discretize(data), std::invalid_argument);
}

TEST_CASE("objective") {
    const auto dp = discretize(stoc::test::small_problem(8, 6));
    StateCoeffs<double> y(7, 9);
    y.block(6) = dp.yd;
    CHECK(objective(dp, y, ControlCoeffs<double>(6, 9)) == 0.0);

    const double c = 0.37;
    const double expected = dp.lambda / 2 * c * c * 1.0 * 1.0;
    CHECK(objective(dp, y, ControlCoeffs<double>::constant(6, 9, c)) == doctest::Approx(expected).epsilon(1e-13));

    // Misfit term against a direct quadrature of the terminal residual.
    y.block(6) = dp.yd + Vec::Constant(9, 0.5);
    const auto terms = objective_terms(dp, y, ControlCoeffs<double>(6, 9));
    CHECK(terms.misfit == doctest::Approx(0.5 * 0.25));
    CHECK(terms.regularization == 0.0);
}

TEST_CASE("adjoint right-hand side") {
    const auto dp = discretize(stoc::test::small_problem(2, 3));
    StateCoeffs<double> y(4, 3);
    y.block(3) = dp.yd;
    CHECK(adjoint_rhs(dp, y).data().norm() == 0.0);
    const auto p = dp.op.solve_transpose(adjoint_rhs(dp, y));
    CHECK(p.p1.data().norm() + p.p2.norm() == 0.0);

    y.block(3) = dp.yd + Vec::Ones(3);
    const auto g = adjoint_rhs(dp, y);
    CHECK(g.block(3)(0) == doctest::Approx(0.25));
    CHECK(g.block(3)(1) == doctest::Approx(0.5));
    CHECK(g.block(3)(2) == doctest::Approx(0.25));
    CHECK(g.data().head(9).norm() == 0.0);
}

TEST_CASE("reduced gradient") {
    const auto dp = discretize(stoc::test::small_problem(4, 4));
    const auto u = ControlCoeffs<double>::constant(4, 5, 2.0);
    CHECK((reduced_gradient(dp, u, ControlCoeffs<double>(4, 5)).data() - dp.lambda * u.data()).norm() == 0.0);
    CHECK_THROWS_AS(reduced_gradient(dp, u, ControlCoeffs<double>(3, 5)), SizeMismatch);
}

TEST_CASE("space-time gradient matches central finite differences") {
    const auto dp = discretize(stoc::test::small_problem(4, 4));
    std::mt19937 rng(21);
    const auto u = stoc::test::random_blocks<ControlTag>(rng, 4, 5, 0.3);
    const auto g = gradient_at(dp, u);
    for (int r = 0; r < 20; ++r) {
        const auto d = stoc::test::random_blocks<ControlTag>(rng, 4, 5);
        const double eps = 1e-5 / weighted_norm(dp, d) * std::max(1.0, weighted_norm(dp, u));
        const double fd = (reduced_objective(dp, add(u, eps, d)) - reduced_objective(dp, add(u, -eps, d))) / (2 * eps);
        const double ip = weighted_inner(dp, g, d);
        CHECK(std::abs(fd - ip) / std::abs(ip) <= 1e-6);
    }
}

TEST_CASE("unconstrained minimizer has vanishing gradient") {
    const auto dp = discretize(stoc::test::small_problem(4, 4));
    // The gradient is affine in u; recover it column by column and solve H u = -g(0).
    const Eigen::Index n = 20;
    const auto g0 = gradient_at(dp, ControlCoeffs<double>(4, 5));
    Dense H(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ControlCoeffs<double> e(4, 5);
        e.data()(i) = 1.0;
        H.col(i) = gradient_at(dp, e).data() - g0.data();
    }
    ControlCoeffs<double> u_star(4, 5, H.partialPivLu().solve(-g0.data()));
    CHECK(weighted_norm(dp, gradient_at(dp, u_star)) <= 1e-8);
}

TEST_CASE("control-to-state map is affine") {
    const auto dp = discretize(stoc::test::small_problem(6, 5));
    std::mt19937 rng(31);
    const SpaceTimeBackend<double> be(dp);
    const auto y0 = be.solve_state(ControlCoeffs<double>(5, 7));
    for (int r = 0; r < 5; ++r) {
        const auto u1 = stoc::test::random_blocks<ControlTag>(rng, 5, 7);
        const auto u2 = stoc::test::random_blocks<ControlTag>(rng, 5, 7);
        const Vec lhs = be.solve_state(add(u1, 1.0, u2)).data() - y0.data();
        const Vec rhs = (be.solve_state(u1).data() - y0.data()) + (be.solve_state(u2).data() - y0.data());
        CHECK(stoc::test::rel_err(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("reduced objective is strictly convex along random segments") {
    const auto dp = discretize(stoc::test::small_problem(6, 5));
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    for (int r = 0; r < 30; ++r) {
        const auto u = stoc::test::random_blocks<ControlTag>(rng, 5, 7);
        const auto v = stoc::test::random_blocks<ControlTag>(rng, 5, 7);
        const double a = unif(rng);
        ControlCoeffs<double> m = u;
        m.data() = a * u.data() + (1 - a) * v.data();
        const double gap = a * reduced_objective(dp, u) + (1 - a) * reduced_objective(dp, v) - reduced_objective(dp, m);
        // Exact gap: a(1-a)/2 |u-v|_H^2 >= a(1-a) lambda/2 |u-v|_w^2.
        const double floor = a * (1 - a) * dp.lambda / 2 * std::pow(weighted_norm(dp, add(u, -1.0, v)), 2);
        CHECK(gap >= 0.999 * floor);
        CHECK(gap > 0.0);
    }
}

TEST_CASE("KKT diagnostics") {
    auto data = stoc::test::small_problem(2, 2);
    data.bounds = {-1.0, 1.0};
    const auto dp = discretize(data);

    const auto inside = ControlCoeffs<double>::constant(2, 3, 0.3);
    const auto zero = ControlCoeffs<double>(2, 3);
    auto d = kkt_residual(dp, inside, zero, dp.bounds);
    CHECK(d.projected_gradient_norm == 0.0);
    CHECK(d.complementarity_violation == 0.0);
    CHECK(d.feasibility_violation == 0.0);

    const auto at_upper = ControlCoeffs<double>::constant(2, 3, 1.0);
    const auto negative = ControlCoeffs<double>::constant(2, 3, -0.4);
    d = kkt_residual(dp, at_upper, negative, dp.bounds);
    CHECK(d.projected_gradient_norm == 0.0);
    CHECK(d.complementarity_violation == 0.0);

    // Interior point with nonzero gradient: |g| = 0.2 everywhere.
    const auto g = ControlCoeffs<double>::constant(2, 3, 0.2);
    d = kkt_residual(dp, inside, g, dp.bounds);
    CHECK(d.projected_gradient_norm == doctest::Approx(0.2));  // |Omega| T = 1
    CHECK(d.complementarity_violation == doctest::Approx(0.2));

    auto outside = inside;
    outside.block(1)(0) = 1.5;
    CHECK(kkt_residual(dp, outside, zero, dp.bounds).feasibility_violation == doctest::Approx(0.5));
}
