#include "hjfb/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <variant>

#include "hjfb/errors.hpp"

namespace hjfb {

namespace {

void require_eps(double eps) {
    if (!(eps > 0.0 && eps < 0.25)) throw InvalidArgument("eps must lie in (0, 1/4)");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::vector<double> default_eps_schedule() {
    std::vector<double> eps;
    for (double e = 0.2; e >= 1e-3; e *= 0.5) eps.push_back(e);
    if (eps.back() != 1e-3) eps.push_back(1e-3);
    return eps;
}

TwoPhaseProblem::TwoPhaseProblem(Grid grid, EllipticOperator trace_operator, Hamiltonian h,
                                 double lambda_plus, double lambda_minus, GridFunction boundary,
                                 std::vector<double> eps_schedule, FixedPointParams fixed_point,
                                 SolveParams inner)
    : grid_(std::move(grid)),
      op_(std::move(trace_operator)),
      h_(std::move(h)),
      lambda_plus_(lambda_plus),
      lambda_minus_(lambda_minus),
      boundary_(std::move(boundary)),
      eps_schedule_(std::move(eps_schedule)),
      fixed_point_(fixed_point),
      inner_(inner) {
    const auto& kind = op_.kind();
    if (!std::holds_alternative<EllipticOperator::NegativeTrace>(kind) &&
        !std::holds_alternative<EllipticOperator::WeightedTrace>(kind)) {
        throw InvalidArgument("two-phase problems need a trace-type operator -Tr(A D^2 u)");
    }
    if (!(lambda_minus_ > 0.0 && lambda_minus_ <= lambda_plus_)) {
        throw InvalidArgument("two-phase problems need 0 < lambda_- <= lambda_+");
    }
    if (eps_schedule_.empty()) throw InvalidArgument("eps schedule must be nonempty");
    for (std::size_t k = 0; k < eps_schedule_.size(); ++k) {
        require_eps(eps_schedule_[k]);
        if (k > 0 && !(eps_schedule_[k] < eps_schedule_[k - 1])) {
            throw InvalidArgument("eps schedule must be strictly decreasing");
        }
    }
    if (!(fixed_point_.damping > 0.0 && fixed_point_.damping <= 1.0)) {
        throw InvalidArgument("fixed-point damping must lie in (0, 1]");
    }
    if (!(fixed_point_.tol_fp > 0.0) || fixed_point_.max_outer < 1) {
        throw InvalidArgument("fixed-point tolerance must be positive and max_outer >= 1");
    }
    inner_.validate();
    if (!(boundary_.grid() == grid_)) throw DimensionMismatch("boundary data must live on the grid");
    // Validates dimensions and 2D axis alignment once, up front.
    (void)auxiliary(eps_schedule_.front(), GridFunction(grid_, lambda_minus_));

    boundary_min_ = 1e300;
    nondegeneracy_ = 1e300;
    for (std::size_t k = 0; k < grid_.node_count(); ++k) {
        if (!grid_.is_boundary(k)) continue;
        boundary_min_ = std::min(boundary_min_, boundary_[k]);
        const Vec x = grid_.coordinates(k);
        const auto ij = grid_.multi(k);
        // -gradient of F with respect to M is A(x) for trace operators.
        const SymMat a = -op_.gradient(SymMat(grid_.dim()), x);
        for (int axis = 0; axis < grid_.dim(); ++axis) {
            const int i = ij[static_cast<std::size_t>(axis)];
            if (i == 0 || i == grid_.cells(axis)) nondegeneracy_ = std::min(nondegeneracy_, a(axis, axis));
        }
    }
    if (!(boundary_min_ > 0.0 && boundary_min_ < 2.0 * lambda_minus_)) {
        warnings_.push_back("boundary data violates 0 < inf g < 2 lambda_- (inf g = " +
                            format_number(boundary_min_) + ", 2 lambda_- = " +
                            format_number(2.0 * lambda_minus_) + ")");
    }
    if (!(nondegeneracy_ > 0.0)) {
        warnings_.push_back("A is degenerate in the normal direction on the boundary (min nu^T A nu = " +
                            format_number(nondegeneracy_) + ")");
    }
    if (lambda_minus_ == lambda_plus_) {
        warnings_.push_back("lambda_- == lambda_+: the phase indicator has no effect");
    }
}

DiscreteProblem TwoPhaseProblem::auxiliary(double eps, GridFunction rhs) const {
    return DiscreteProblem(grid_, op_, h_, std::move(rhs), boundary_, eps);
}

GridFunction clamp_indicator(const GridFunction& v, double eps) {
    require_eps(eps);
    GridFunction g(v.grid());
    for (std::size_t k = 0; k < v.size(); ++k) {
        g[k] = std::clamp((v[k] + eps) / (2.0 * eps), 0.0, 1.0);
    }
    return g;
}

bool mollifier_resolved(const Grid& grid, double eps) { return eps > grid.min_spacing(); }

GridFunction mollify(const GridFunction& gv, double eps) {
    const Grid& g = gv.grid();
    if (!mollifier_resolved(g, eps)) return gv;

    struct Tap {
        int di;
        int dj;
        double w;
    };
    std::vector<Tap> taps;
    const int rx = static_cast<int>(std::floor(eps / g.spacing(0)));
    const int ry = g.dim() == 2 ? static_cast<int>(std::floor(eps / g.spacing(1))) : 0;
    for (int di = -rx; di <= rx; ++di) {
        for (int dj = -ry; dj <= ry; ++dj) {
            const double zx = di * g.spacing(0);
            const double zy = g.dim() == 2 ? dj * g.spacing(1) : 0.0;
            const double s = (zx * zx + zy * zy) / (eps * eps);
            if (s >= 1.0) continue;
            taps.push_back({di, dj, std::exp(-1.0 / (1.0 - s))});
        }
    }
    GridFunction out(g);
    const int nx = g.nodes(0);
    const int ny = g.dim() == 2 ? g.nodes(1) : 1;
    for (std::size_t k = 0; k < gv.size(); ++k) {
        const auto ij = g.multi(k);
        double num = 0.0;
        double den = 0.0;
        for (const Tap& t : taps) {
            const int i = ij[0] + t.di;
            const int j = ij[1] + t.dj;
            if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
            num += t.w * gv[g.flat(i, j)];
            den += t.w;
        }
        out[k] = std::clamp(num / den, 0.0, 1.0);
    }
    return out;
}

GridFunction two_phase_rhs(const GridFunction& h, double lambda_plus, double lambda_minus) {
    GridFunction r(h.grid());
    for (std::size_t k = 0; k < h.size(); ++k) {
        r[k] = lambda_plus * h[k] + lambda_minus * (1.0 - h[k]);
    }
    return r;
}

GridFunction regularized_rhs(const TwoPhaseProblem& p, const GridFunction& v, double eps) {
    return two_phase_rhs(mollify(clamp_indicator(v, eps), eps), p.lambda_plus(), p.lambda_minus());
}

FixedPointOutcome fixed_point_solve(const TwoPhaseProblem& p, double eps, const GridFunction& v0) {
    require_eps(eps);
    if (!(v0.grid() == p.grid())) throw DimensionMismatch("initial iterate lives on a different grid");
    const FixedPointParams& fp = p.fixed_point();
    const double rhs_tol = 1e-14 * std::max(1.0, p.lambda_plus());

    FixedPointOutcome out;
    out.mollifier_skipped = !mollifier_resolved(p.grid(), eps);
    GridFunction v = v0;
    const Grid& g = p.grid();
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (g.is_boundary(k)) v[k] = p.boundary()[k];
    }
    GridFunction warm = v;
    GridFunction rhs_v = regularized_rhs(p, v, eps);

    while (out.outer_iters < fp.max_outer) {
        ++out.outer_iters;
        const DiscreteProblem aux = p.auxiliary(eps, rhs_v);
        SolveOutcome inner = solve_dirichlet(aux, p.inner(), warm);
        out.inner_iters += inner.iters;
        out.inner_residual = inner.final_residual;
        if (!inner.converged) {
            out.u = std::move(inner.u);
            out.inner_failed = true;
            out.message = "inner solve did not converge at outer iteration " +
                          std::to_string(out.outer_iters) + ": " + inner.message;
            return out;
        }
        const GridFunction& tv = inner.u;
        const double step = tv.distance(v);
        const GridFunction rhs_tv = regularized_rhs(p, tv, eps);
        const double rhs_change = rhs_tv.distance(rhs_v);
        out.history.push_back(step);
        out.fixed_point_residual = step;
        if (step <= fp.tol_fp || rhs_change <= rhs_tol) {
            out.converged = true;
            out.self_consistent_residual =
                discrete_residual(p.auxiliary(eps, rhs_tv), tv).sup_norm();
            out.u = tv;
            out.message = rhs_change <= rhs_tol ? "converged (right-hand side reproduced)"
                                                : "converged";
            return out;
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = (1.0 - fp.damping) * v[k] + fp.damping * tv[k];
        }
        warm = tv;
        rhs_v = regularized_rhs(p, v, eps);
    }
    out.u = v;
    out.message = "outer iteration did not converge within max_outer";
    return out;
}

ContinuationResult epsilon_continuation(const TwoPhaseProblem& p, std::optional<GridFunction> v0,
                                        bool warm_start) {
    const GridFunction start = v0 ? std::move(*v0) : boundary_interpolant(p.boundary());
    ContinuationResult result;
    GridFunction current = start;
    std::optional<GridFunction> previous;
    result.all_converged = true;
    for (double eps : p.eps_schedule()) {
        ContinuationStep step;
        step.eps = eps;
        step.outcome = fixed_point_solve(p, eps, warm_start ? current : start);
        if (previous) step.delta_to_previous = step.outcome.u.distance(*previous);
        const bool ok = step.outcome.converged;
        current = step.outcome.u;
        previous = current;
        result.trace.push_back(std::move(step));
        if (!ok) {
            result.all_converged = false;
            result.failed_eps = eps;
            break;
        }
    }
    result.u_star = current;
    return result;
}

char PhaseDecomposition::phase(std::size_t node) const {
    if (positive_mask[node]) return '+';
    if (negative_mask[node]) return '-';
    return '0';
}

double default_zero_band(double solver_tol) { return std::max(1e-4, 10.0 * solver_tol); }

PhaseDecomposition extract_phases(const GridFunction& u, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("zero band half-width must be positive");
    PhaseDecomposition ph;
    ph.zero_threshold = delta;
    const std::size_t n = u.size();
    ph.positive_mask.assign(n, false);
    ph.negative_mask.assign(n, false);
    ph.zero_mask.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (u[k] > delta) ph.positive_mask[k] = true;
        else if (u[k] < -delta) ph.negative_mask[k] = true;
        else ph.zero_mask[k] = true;
    }
    const Grid& g = u.grid();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto corners = g.cell_corners(c);
        const char first = ph.phase(corners.front());
        if (std::any_of(corners.begin() + 1, corners.end(),
                        [&](std::size_t k) { return ph.phase(k) != first; })) {
            ph.free_boundary_cells.push_back(c);
        }
    }
    return ph;
}

void write_phase_csv(std::ostream& out, const GridFunction& u, const PhaseDecomposition& phases) {
    const Grid& g = u.grid();
    out << (g.dim() == 1 ? "x,phase\n" : "x,y,phase\n");
    char buf[40];
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec x = g.coordinates(k);
        for (int a = 0; a < g.dim(); ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", x[a]);
            out << buf << ',';
        }
        out << phases.phase(k) << '\n';
    }
}

double default_band_tolerance(const GridFunction& u) {
    return 10.0 * std::sqrt(u.grid().max_spacing()) * (1.0 + u.sup_norm());
}

CheckReport residual_band_check(const TwoPhaseProblem& p, const GridFunction& u, double delta,
                                std::optional<double> band_tol) {
    const double tol = band_tol.value_or(default_band_tolerance(u));
    const PhaseDecomposition ph = extract_phases(u, delta);
    const DiscreteProblem aux = p.auxiliary(p.eps_schedule().back(), GridFunction(p.grid()));
    const GridFunction q = operator_values(aux, u);
    const Grid& g = p.grid();
    WorstCase wc;
    int checked = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (g.is_boundary(k)) continue;
        ++checked;
        double violation = std::max(p.lambda_minus() - q[k], q[k] - p.lambda_plus());
        if (ph.positive_mask[k]) violation = std::max(violation, std::abs(q[k] - p.lambda_plus()));
        if (ph.negative_mask[k]) violation = std::max(violation, std::abs(q[k] - p.lambda_minus()));
        wc.offer(violation, [&] {
            std::vector<double> w{static_cast<double>(k)};
            const Vec x = g.coordinates(k);
            for (int a = 0; a < g.dim(); ++a) w.push_back(x[a]);
            w.push_back(q[k]);
            return w;
        });
    }
    CheckReport r;
    r.name = "residual_band";
    r.worst_margin = wc.worst();
    r.tolerance = tol;
    r.passed = wc.worst() <= tol;
    r.witness = wc.witness();
    r.n_samples = checked;
    r.note = "witness = (node, x, Q); Q = -Tr(A D^2 u) + H(Du, x); margin = distance outside the band";
    return r;
}

}  // namespace hjfb
