#pragma once

#include "stoc/backend.hpp"

#include <memory>

namespace stoc {

/// How the nodal-in-time CN adjoint is mapped onto the interval-wise control grid.
enum class AdjointSampling {
    right_endpoint,    ///< block l takes p^{l+1}
    interval_average,  ///< block l takes (p^l + p^{l+1}) / 2
};

/// Nodal-in-time trajectories of the method-of-lines baseline.
template <typename Scalar>
struct CnTrajectory {
    StateCoeffs<Scalar> states;    ///< y^0..y^K
    StateCoeffs<Scalar> adjoints;  ///< p^0..p^K
};

/// Method of lines: Crank-Nicolson for the state forward in time and for the
/// continuous adjoint equation backward in time.
///
/// This is deliberately a separate code path from SpaceTimeOperator (own
/// matrices, own factorization) so the two can be checked against each other.
template <typename Scalar>
class CrankNicolsonStepper {
public:
    explicit CrankNicolsonStepper(const DiscreteProblem<Scalar>& dp) : dp_(dp) {
        const Scalar half = dp.grid.dt / 2;
        implicit_ = dp.spatial.M + half * dp.spatial.A;
        explicit_ = dp.spatial.M - half * dp.spatial.A;
        implicit_factor_ = std::make_shared<const SpdFactor<Scalar>>(implicit_, "M_h + dt/2 A_h");
        mass_factor_ = std::make_shared<const SpdFactor<Scalar>>(dp.spatial.M, "M_h");
    }

    StateCoeffs<Scalar> forward(const ControlCoeffs<Scalar>& u) const {
        if (u.n_blocks() != dp_.K() || u.block_size() != dp_.n_h()) throw SizeMismatch("cn_forward: control layout");
        const auto& M = dp_.spatial.M;
        StateCoeffs<Scalar> y(dp_.K() + 1, dp_.n_h());
        y.block(0) = mass_factor_->solve(M * dp_.y0);
        for (std::size_t l = 0; l < dp_.K(); ++l) {
            VectorX<Scalar> rhs = explicit_ * y.block(l) + dp_.grid.dt * (M * u.block(l)) + dp_.eta_load.block(l);
            y.block(l + 1) = implicit_factor_->solve(rhs);
        }
        return y;
    }

    /// p^K = terminal misfit; (M + dt/2 A) p^k = (M - dt/2 A) p^{k+1}.
    StateCoeffs<Scalar> backward(const VectorX<Scalar>& terminal_misfit) const {
        if (static_cast<std::size_t>(terminal_misfit.size()) != dp_.n_h())
            throw SizeMismatch("cn_backward: terminal misfit length");
        StateCoeffs<Scalar> p(dp_.K() + 1, dp_.n_h());
        p.block(dp_.K()) = terminal_misfit;
        for (std::size_t k = dp_.K(); k-- > 0;) p.block(k) = implicit_factor_->solve(explicit_ * p.block(k + 1));
        return p;
    }

private:
    const DiscreteProblem<Scalar>& dp_;
    SparseMatrix<Scalar> implicit_;
    SparseMatrix<Scalar> explicit_;
    std::shared_ptr<const SpdFactor<Scalar>> implicit_factor_;
    std::shared_ptr<const SpdFactor<Scalar>> mass_factor_;
};

template <typename Scalar>
ControlCoeffs<Scalar> interval_average_adjoint(const StateCoeffs<Scalar>& adjoints) {
    const std::size_t K = adjoints.n_blocks() - 1;
    ControlCoeffs<Scalar> out(K, adjoints.block_size());
    for (std::size_t l = 0; l < K; ++l) out.block(l) = Scalar(0.5) * (adjoints.block(l) + adjoints.block(l + 1));
    return out;
}

template <typename Scalar>
ControlCoeffs<Scalar> right_endpoint_adjoint(const StateCoeffs<Scalar>& adjoints) {
    const std::size_t K = adjoints.n_blocks() - 1;
    ControlCoeffs<Scalar> out(K, adjoints.block_size());
    out.data() = adjoints.data().tail(static_cast<Eigen::Index>(K * adjoints.block_size()));
    return out;
}

template <typename Scalar>
ControlCoeffs<Scalar> sample_adjoint(const StateCoeffs<Scalar>& adjoints, AdjointSampling sampling) {
    return sampling == AdjointSampling::interval_average ? interval_average_adjoint(adjoints)
                                                         : right_endpoint_adjoint(adjoints);
}

template <typename Scalar>
class SemiDiscreteBackend final : public SolverBackend<Scalar> {
public:
    explicit SemiDiscreteBackend(const DiscreteProblem<Scalar>& dp,
                                 AdjointSampling sampling = AdjointSampling::right_endpoint)
        : dp_(dp), stepper_(dp), sampling_(sampling) {}

    std::string_view name() const override { return "semi-discrete"; }

    StateCoeffs<Scalar> solve_state(const ControlCoeffs<Scalar>& u) const override { return stepper_.forward(u); }

    ControlCoeffs<Scalar> solve_adjoint(const StateCoeffs<Scalar>& y) const override {
        return sample_adjoint(trajectory_adjoint(y), sampling_);
    }

    StateCoeffs<Scalar> trajectory_adjoint(const StateCoeffs<Scalar>& y) const {
        return stepper_.backward(y.block(dp_.K()) - dp_.yd);
    }

    const CrankNicolsonStepper<Scalar>& stepper() const { return stepper_; }

private:
    const DiscreteProblem<Scalar>& dp_;
    CrankNicolsonStepper<Scalar> stepper_;
    AdjointSampling sampling_;
};

}  // namespace stoc

namespace stoc {

template <typename Scalar>
StateCoeffs<Scalar> cn_forward(const DiscreteProblem<Scalar>& dp, const ControlCoeffs<Scalar>& u) {
    return CrankNicolsonStepper<Scalar>(dp).forward(u);
}

template <typename Scalar>
StateCoeffs<Scalar> cn_backward(const DiscreteProblem<Scalar>& dp, const VectorX<Scalar>& terminal_misfit) {
    return CrankNicolsonStepper<Scalar>(dp).backward(terminal_misfit);
}

}  // namespace stoc
