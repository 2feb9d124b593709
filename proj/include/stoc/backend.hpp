#pragma once

#include "stoc/control.hpp"

#include <string_view>

namespace stoc {

/// State and adjoint solves behind the projected gradient loop.
///
/// Both implementations consume and produce the same coefficient layouts, so
/// the optimizer runs unchanged over either discretization.
template <typename Scalar>
class SolverBackend {
public:
    virtual ~SolverBackend() = default;

    virtual std::string_view name() const = 0;

    virtual StateCoeffs<Scalar> solve_state(const ControlCoeffs<Scalar>& u) const = 0;

    /// Adjoint field on the control grid, i.e. the F* p part of the gradient.
    virtual ControlCoeffs<Scalar> solve_adjoint(const StateCoeffs<Scalar>& y) const = 0;
};

/// Space-time Petrov-Galerkin backend: the adjoint is the transposed system.
template <typename Scalar>
class SpaceTimeBackend final : public SolverBackend<Scalar> {
public:
    explicit SpaceTimeBackend(const DiscreteProblem<Scalar>& dp) : dp_(dp) {}

    std::string_view name() const override { return "space-time"; }

    StateCoeffs<Scalar> solve_state(const ControlCoeffs<Scalar>& u) const override {
        return dp_.op.solve_forward(build_rhs(dp_, u));
    }

    ControlCoeffs<Scalar> solve_adjoint(const StateCoeffs<Scalar>& y) const override {
        return dp_.op.solve_transpose(adjoint_rhs(dp_, y)).p1;
    }

    AdjointCoeffs<Scalar> full_adjoint(const StateCoeffs<Scalar>& y) const {
        return dp_.op.solve_transpose(adjoint_rhs(dp_, y));
    }

private:
    const DiscreteProblem<Scalar>& dp_;
};

}  // namespace stoc
