#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjfb/check_report.hpp"
#include "hjfb/discretization.hpp"

namespace hjfb {

enum class PseudoTimeMethod {
    /// Linearized backward-Euler pseudo-time steps with switched evolution
    /// relaxation of the step (pseudo-transient continuation).
    Implicit,
    /// u <- u - dt R(u) with dt from the explicit stability bound.
    Explicit,
};

struct SolveParams {
    double tol = 1e-8;
    int max_iters = 200000;
    /// Fraction of the explicit stability bound used for dt (explicit) or for
    /// the first step (implicit).
    double pseudo_dt = 0.9;
    /// Picard damping for the outer free-boundary iteration.
    double damping = 0.5;
    int log_every = 1;
    PseudoTimeMethod method = PseudoTimeMethod::Implicit;

    /// Throws InvalidArgument unless tol > 0, 0 < pseudo_dt <= 1, 0 < damping <= 1.
    void validate() const;
};

struct SolveOutcome {
    GridFunction u;
    bool converged = false;
    double final_residual = 0.0;
    int iters = 0;
    std::vector<std::pair<int, double>> residual_history;
    std::string message;
};

/// Largest stable explicit step h^2 / (2 d Lambda_F + h sigma d + h^2 zero_order)
/// at the iterate u, h the smallest spacing.
double explicit_step_bound(const DiscreteProblem& p, const GridFunction& u);

/// Transfinite (Coons) interpolation of the boundary values into the interior;
/// linear interpolation in 1D.
GridFunction boundary_interpolant(const GridFunction& boundary);

/// Drives the discrete residual to zero in pseudo-time. Nonconvergence is
/// reported through `converged`, a non-finite iterate throws NonFiniteError.
SolveOutcome solve_dirichlet(const DiscreteProblem& p, const SolveParams& params,
                             std::optional<GridFunction> u0 = std::nullopt);

/// Given a discrete subsolution u (residual <= premise_tol) and supersolution v
/// (residual >= -premise_tol) with u <= v on the boundary and zero_order > 0,
/// passes iff u <= v + 1e-9 everywhere. A failed premise is reported, not thrown.
CheckReport comparison_check(const DiscreteProblem& p, const GridFunction& u, const GridFunction& v,
                             double premise_tol = 1e-8);

/// "iter,residual" rows.
void write_history_csv(std::ostream& out, const SolveOutcome& outcome);

}  // namespace hjfb
