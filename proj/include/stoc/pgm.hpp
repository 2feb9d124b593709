#pragma once

#include "stoc/backend.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace stoc {

template <typename Scalar>
struct PgmConfig {
    Scalar tau_rel{1e-4};
    Scalar tau_abs{1e-8};
    Scalar tau_stagnation{1e-8};
    Scalar s0{1};
    Scalar backtrack_factor{0.5};
    Scalar armijo_c{1e-4};
    std::size_t max_iters = 500;
    std::size_t max_backtracks = 40;

    void validate() const {
        if (!(tau_abs > Scalar(0)) || !(tau_abs <= tau_rel))
            throw std::invalid_argument("PgmConfig: need 0 < tau_abs <= tau_rel");
        if (!(tau_stagnation >= Scalar(0)))
            throw std::invalid_argument("PgmConfig: tau_stagnation must be non-negative");
        if (!(s0 > Scalar(0)))
            throw std::invalid_argument("PgmConfig: s0 must be positive");
        if (!(backtrack_factor > Scalar(0) && backtrack_factor < Scalar(1)))
            throw std::invalid_argument("PgmConfig: backtrack_factor must lie in (0, 1)");
    }
};

enum class StopReason {
    step_criterion,  ///< |u^{l-1} - u^{l}_{s0}| <= tau_rel |u^0 - u^{l}_{s0}| + tau_abs
    stagnation,      ///< J^{l-1} - J^{l} <= tau_stagnation
    no_descent,      ///< backtracking exhausted without sufficient decrease
    max_iters,
    error,
};

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::step_criterion: return "step-criterion";
        case StopReason::stagnation: return "stagnation";
        case StopReason::no_descent: return "no-descent";
        case StopReason::max_iters: return "max-iters";
        case StopReason::error: return "error";
    }
    return "unknown";
}

template <typename Scalar>
struct IterationRecord {
    Scalar objective{};
    Scalar misfit{};
    Scalar regularization{};
    Scalar step{};  ///< accepted step; 0 for the initial entry
};

template <typename Scalar>
struct RunRecord {
    std::size_t iterations = 0;
    /// Entry 0 is the initial control, entry l the l-th accepted iterate.
    std::vector<IterationRecord<Scalar>> history;
    ControlCoeffs<Scalar> u;
    StateCoeffs<Scalar> y;
    ControlCoeffs<Scalar> p;  ///< backend adjoint field at the final iterate
    StopReason stop_reason = StopReason::max_iters;
    double wall_time_seconds = 0.0;

    bool converged() const {
        return stop_reason == StopReason::step_criterion || stop_reason == StopReason::stagnation;
    }
    Scalar final_objective() const { return history.back().objective; }
};

template <typename Scalar>
struct StepResult {
    Scalar s{};
    ControlCoeffs<Scalar> u_trial;
    StateCoeffs<Scalar> y_trial;
    Scalar J_trial{};
    bool accepted = false;
    /// Candidate with the unreduced step s0, needed by the step criterion.
    ControlCoeffs<Scalar> u_s0;
};

/// Armijo backtracking, restarted from s0 on every call.
///
/// Accepts the largest s = s0 * factor^m with
/// J(P(u + s v)) <= J(u) - c <-v, u - P(u + s v)>_w, the projected form of the
/// sufficient-decrease test; without active bounds it equals J(u) - c s |v|_w^2.
template <typename Scalar>
StepResult<Scalar> step_size(const DiscreteProblem<Scalar>& dp, const SolverBackend<Scalar>& backend,
                             const ControlCoeffs<Scalar>& u, const ControlCoeffs<Scalar>& v, Scalar J_current,
                             const PgmConfig<Scalar>& config) {
    StepResult<Scalar> r;
    Scalar s = config.s0;
    for (std::size_t m = 0; m <= config.max_backtracks; ++m, s *= config.backtrack_factor) {
        ControlCoeffs<Scalar> trial = u;
        trial.data() += s * v.data();
        trial = project(trial, dp.bounds);
        if (m == 0) r.u_s0 = trial;

        ControlCoeffs<Scalar> moved = trial;
        moved.data() -= u.data();
        const Scalar predicted = config.armijo_c * weighted_inner(dp, v, moved);

        auto y = backend.solve_state(trial);
        const Scalar J = objective(dp, y, trial);
        r.s = s;
        r.u_trial = std::move(trial);
        r.y_trial = std::move(y);
        r.J_trial = J;
        if (J <= J_current - predicted) {
            r.accepted = true;
            return r;
        }
    }
    return r;
}

/// Decide whether to stop after an accepted update. Criterion (1) wins ties.
template <typename Scalar>
std::optional<StopReason> stopping_check(const DiscreteProblem<Scalar>& dp, Scalar J_prev, Scalar J_curr,
                                         const ControlCoeffs<Scalar>& u_first, const ControlCoeffs<Scalar>& u_prev,
                                         const ControlCoeffs<Scalar>& u_s0, const PgmConfig<Scalar>& config) {
    ControlCoeffs<Scalar> a = u_prev;
    a.data() -= u_s0.data();
    ControlCoeffs<Scalar> b = u_first;
    b.data() -= u_s0.data();
    if (weighted_norm(dp, a) <= config.tau_rel * weighted_norm(dp, b) + config.tau_abs)
        return StopReason::step_criterion;
    if (J_prev - J_curr <= config.tau_stagnation) return StopReason::stagnation;
    return std::nullopt;
}

/// Projected gradient method over `backend`.
template <typename Scalar>
RunRecord<Scalar> run(const DiscreteProblem<Scalar>& dp, const SolverBackend<Scalar>& backend,
                      const PgmConfig<Scalar>& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    RunRecord<Scalar> rec;
    const ControlCoeffs<Scalar> u_first = project(dp.u_init, dp.bounds);
    ControlCoeffs<Scalar> u = u_first;
    StateCoeffs<Scalar> y = backend.solve_state(u);
    auto terms = objective_terms(dp, y, u);
    rec.history.push_back({terms.total(), terms.misfit, terms.regularization, Scalar(0)});

    rec.stop_reason = StopReason::max_iters;
    for (std::size_t it = 0; it < config.max_iters; ++it) {
        const ControlCoeffs<Scalar> p1 = backend.solve_adjoint(y);
        ControlCoeffs<Scalar> v = reduced_gradient(dp, u, p1);
        v.data() = -v.data();

        const Scalar J_prev = rec.history.back().objective;
        StepResult<Scalar> step = step_size(dp, backend, u, v, J_prev, config);
        if (!step.accepted) {
            rec.stop_reason = StopReason::no_descent;
            break;
        }

        const ControlCoeffs<Scalar> u_prev = std::move(u);
        u = std::move(step.u_trial);
        y = std::move(step.y_trial);
        terms = objective_terms(dp, y, u);
        rec.history.push_back({terms.total(), terms.misfit, terms.regularization, step.s});
        rec.iterations = it + 1;

        if (auto stop = stopping_check(dp, J_prev, terms.total(), u_first, u_prev, step.u_s0, config)) {
            rec.stop_reason = *stop;
            break;
        }
    }

    rec.p = backend.solve_adjoint(y);
    rec.u = std::move(u);
    rec.y = std::move(y);
    rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

}  // namespace stoc
