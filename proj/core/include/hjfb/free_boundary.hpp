#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjfb/check_report.hpp"
#include "hjfb/solver.hpp"

namespace hjfb {

/// Outer damped Picard iteration v <- (1 - damping) v + damping T v.
struct FixedPointParams {
    double damping = 0.5;
    double tol_fp = 1e-6;
    int max_outer = 200;
};

/// 0.2, 0.1, 0.05, ... while >= 1e-3, closed by 1e-3 itself.
std::vector<double> default_eps_schedule();

/// Two-phase problem
///
///   -Tr(A(x) D^2 u) + H(Du, x) = lambda_+ on {u > 0}, lambda_- on {u < 0},  u = g on the boundary,
///
/// approached through  eps u - Tr(A D^2 u) + H(Du, x) = lambda_+ h + lambda_- (1 - h)
/// with h the mollified clamp of u.
class TwoPhaseProblem {
public:
    /// `trace_operator` must be NegativeTrace or WeightedTrace. Requires
    /// 0 < lambda_- <= lambda_+ and a decreasing schedule inside (0, 1/4).
    TwoPhaseProblem(Grid grid, EllipticOperator trace_operator, Hamiltonian h, double lambda_plus,
                    double lambda_minus, GridFunction boundary,
                    std::vector<double> eps_schedule = default_eps_schedule(),
                    FixedPointParams fixed_point = {}, SolveParams inner = {});

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const EllipticOperator& trace_operator() const noexcept { return op_; }
    [[nodiscard]] const Hamiltonian& hamiltonian() const noexcept { return h_; }
    [[nodiscard]] double lambda_plus() const noexcept { return lambda_plus_; }
    [[nodiscard]] double lambda_minus() const noexcept { return lambda_minus_; }
    [[nodiscard]] const GridFunction& boundary() const noexcept { return boundary_; }
    [[nodiscard]] const std::vector<double>& eps_schedule() const noexcept { return eps_schedule_; }
    [[nodiscard]] const FixedPointParams& fixed_point() const noexcept { return fixed_point_; }
    [[nodiscard]] const SolveParams& inner() const noexcept { return inner_; }

    /// inf of g over boundary nodes.
    [[nodiscard]] double boundary_min() const noexcept { return boundary_min_; }
    /// min over boundary nodes and outward axis normals of nu^T A nu.
    [[nodiscard]] double boundary_nondegeneracy() const noexcept { return nondegeneracy_; }
    /// 0 < inf g < 2 lambda_- and nu^T A nu > 0 on the boundary.
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// eps u - Tr(A D^2 u) + H(Du, x) = rhs, u = g.
    [[nodiscard]] DiscreteProblem auxiliary(double eps, GridFunction rhs) const;

private:
    Grid grid_;
    EllipticOperator op_;
    Hamiltonian h_;
    double lambda_plus_;
    double lambda_minus_;
    GridFunction boundary_;
    std::vector<double> eps_schedule_;
    FixedPointParams fixed_point_;
    SolveParams inner_;
    double boundary_min_ = 0.0;
    double nondegeneracy_ = 0.0;
    std::vector<std::string> warnings_;
};

/// clamp((v + eps) / (2 eps), 0, 1) pointwise; requires 0 < eps < 1/4.
GridFunction clamp_indicator(const GridFunction& v, double eps);

/// True when the mollifier radius eps reaches past the nearest neighbour.
bool mollifier_resolved(const Grid& grid, double eps);

/// Discrete convolution with exp(-1 / (1 - |z/eps|^2)) on |z| < eps, weights
/// renormalized over in-domain nodes. Returns gv unchanged when the radius does
/// not resolve (see mollifier_resolved).
GridFunction mollify(const GridFunction& gv, double eps);

/// lambda_+ h + lambda_- (1 - h).
GridFunction two_phase_rhs(const GridFunction& h, double lambda_plus, double lambda_minus);

/// mollify(clamp_indicator(v, eps), eps) mapped through two_phase_rhs.
GridFunction regularized_rhs(const TwoPhaseProblem& p, const GridFunction& v, double eps);

struct FixedPointOutcome {
    GridFunction u;
    bool converged = false;
    int outer_iters = 0;
    int inner_iters = 0;
    /// sup |T v - v| of the last outer step.
    double fixed_point_residual = 0.0;
    /// Residual of the last inner solve.
    double inner_residual = 0.0;
    /// Residual of u against the right-hand side built from u itself.
    double self_consistent_residual = 0.0;
    bool inner_failed = false;
    bool mollifier_skipped = false;
    std::vector<double> history;
    std::string message;
};

/// Damped Picard on T v = solution of the auxiliary problem with rhs from v.
/// Stops when sup |T v - v| <= tol_fp, or when the rhs built from T v equals the
/// one built from v (T v is then itself a fixed point).
FixedPointOutcome fixed_point_solve(const TwoPhaseProblem& p, double eps, const GridFunction& v0);

struct ContinuationStep {
    double eps = 0.0;
    FixedPointOutcome outcome;
    /// sup |u_eps - u_previous_eps|; absent for the first entry.
    std::optional<double> delta_to_previous;
};

struct ContinuationResult {
    GridFunction u_star;
    std::vector<ContinuationStep> trace;
    bool all_converged = false;
    /// eps at which the outer iteration (or an inner solve) failed.
    std::optional<double> failed_eps;
};

/// Runs the schedule, warm-starting every eps from the previous solution unless
/// `warm_start` is false (then every eps starts from v0).
ContinuationResult epsilon_continuation(const TwoPhaseProblem& p,
                                        std::optional<GridFunction> v0 = std::nullopt,
                                        bool warm_start = true);

struct PhaseDecomposition {
    std::vector<bool> positive_mask;
    std::vector<bool> negative_mask;
    std::vector<bool> zero_mask;
    /// Cells (see Grid::cell_corners) whose corners carry different phases.
    std::vector<std::size_t> free_boundary_cells;
    double zero_threshold = 0.0;

    /// '+', '-' or '0'.
    [[nodiscard]] char phase(std::size_t node) const;
};

/// max(1e-4, 10 tol)
double default_zero_band(double solver_tol);

PhaseDecomposition extract_phases(const GridFunction& u, double delta);

/// "x[,y],phase" rows with phase in {+,-,0}.
void write_phase_csv(std::ostream& out, const GridFunction& u, const PhaseDecomposition& phases);

/// 10 sqrt(h) (1 + |u|_inf)
double default_band_tolerance(const GridFunction& u);

/// Q = -Tr(A D^2 u) + H(Du, x) (discrete) at interior nodes must lie in
/// [lambda_- - tol, lambda_+ + tol]; within tol of lambda_+ on {u > delta} and
/// of lambda_- on {u < -delta}. Witness = (node, x..., Q).
CheckReport residual_band_check(const TwoPhaseProblem& p, const GridFunction& u, double delta,
                                std::optional<double> band_tol = std::nullopt);

}  // namespace hjfb
