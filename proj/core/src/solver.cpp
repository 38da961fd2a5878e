#include "hjfb/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hjfb/errors.hpp"
#include "hjfb/parallel.hpp"

namespace hjfb {

namespace {

constexpr double kMaxPseudoStep = 1e14;
constexpr int kMaxBacktracks = 10;
constexpr double kMinGrowth = 2.0;

double sup(const GridFunction& r) {
    double s = 0.0;
    for (double v : r.values()) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        s = std::max(s, std::abs(v));
    }
    return s;
}

double max_viscosity(const DiscreteProblem& p, const GridFunction& u) {
    const Grid& g = p.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (g.is_boundary(k)) continue;
        const auto [minus, plus] = one_sided_gradients(u, k);
        s = std::max(s, select_viscosity(p.hamiltonian(), minus, plus, g.coordinates(k)));
    }
    return s;
}

double l2(const GridFunction& r) {
    double s = 0.0;
    for (double v : r.values()) s += v * v;
    return std::isfinite(s) ? std::sqrt(s) : std::numeric_limits<double>::infinity();
}

void impose_boundary(const DiscreteProblem& p, GridFunction& u) {
    const Grid& g = p.grid();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (g.is_boundary(k)) u[k] = p.boundary()[k];
    }
}

void record(SolveOutcome& out, int iter, double r, int log_every) {
    if (log_every > 0 && (iter % log_every == 0)) out.residual_history.emplace_back(iter, r);
}

void finish(SolveOutcome& out, const SolveParams& params, double r) {
    out.final_residual = r;
    out.converged = r <= params.tol;
    if (out.residual_history.empty() || out.residual_history.back().first != out.iters) {
        out.residual_history.emplace_back(out.iters, r);
    }
}

[[noreturn]] void non_finite(int iter) {
    throw NonFiniteError("iterate became non-finite at pseudo-time iteration " +
                         std::to_string(iter));
}

SolveOutcome solve_explicit(const DiscreteProblem& p, const SolveParams& params, GridFunction u) {
    SolveOutcome out;
    GridFunction r = discrete_residual(p, u);
    double res = sup(r);
    if (!std::isfinite(res)) non_finite(0);
    record(out, 0, res, params.log_every);
    const Grid& g = p.grid();
    while (res > params.tol && out.iters < params.max_iters) {
        const double dt = params.pseudo_dt * explicit_step_bound(p, u);
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (!g.is_boundary(k)) u[k] -= dt * r[k];
        }
        ++out.iters;
        r = discrete_residual(p, u);
        res = sup(r);
        if (!std::isfinite(res)) non_finite(out.iters);
        record(out, out.iters, res, params.log_every);
    }
    out.u = std::move(u);
    finish(out, params, res);
    out.message = out.converged ? "converged" : "maximum iterations reached";
    return out;
}

SolveOutcome solve_implicit(const DiscreteProblem& p, const SolveParams& params, GridFunction u) {
    using SpMat = Eigen::SparseMatrix<double>;
    const Grid& g = p.grid();
    const auto n = static_cast<Eigen::Index>(g.node_count());

    SolveOutcome out;
    GridFunction r = discrete_residual(p, u);
    double res = sup(r);
    if (!std::isfinite(res)) non_finite(0);
    double merit = l2(r);
    record(out, 0, res, params.log_every);

    double dt = params.pseudo_dt * explicit_step_bound(p, u);
    std::vector<NodeLinearization> rows(g.node_count());
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool pattern_ready = false;

    while (res > params.tol && out.iters < params.max_iters) {
        parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) rows[k] = linearize_at(p, u, k);
        });

        triplets.clear();
        Eigen::VectorXd rhs(n);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& row = rows[k];
            const bool boundary = g.is_boundary(k);
            for (std::size_t e = 0; e < row.count; ++e) {
                double v = row.entries[e].second;
                if (!boundary && row.entries[e].first == k) v += 1.0 / dt;
                triplets.emplace_back(static_cast<int>(k), static_cast<int>(row.entries[e].first), v);
            }
            rhs[static_cast<Eigen::Index>(k)] = -row.value;
        }
        SpMat a(n, n);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        if (!pattern_ready) {
            lu.analyzePattern(a);
            pattern_ready = true;
        }
        lu.factorize(a);
        Eigen::VectorXd step;
        bool step_ok = lu.info() == Eigen::Success;
        if (step_ok) {
            step = lu.solve(rhs);
            step_ok = lu.info() == Eigen::Success && step.allFinite();
        }

        ++out.iters;
        bool accepted = false;
        if (step_ok) {
            double alpha = 1.0;
            for (int bt = 0; bt <= kMaxBacktracks; ++bt, alpha *= 0.5) {
                GridFunction trial = u;
                for (std::size_t k = 0; k < trial.size(); ++k) {
                    trial[k] += alpha * step[static_cast<Eigen::Index>(k)];
                }
                GridFunction trial_r = discrete_residual(p, trial);
                const double trial_merit = l2(trial_r);
                if (trial_merit < merit) {
                    // Switched evolution relaxation, with a floor on the growth so a
                    // slowly moving local maximum cannot pin dt.
                    if (bt == 0) {
                        const double ratio = merit / std::max(trial_merit, 1e-300);
                        dt = std::min(kMaxPseudoStep, dt * std::max(kMinGrowth, ratio));
                    }
                    u = std::move(trial);
                    r = std::move(trial_r);
                    res = sup(r);
                    merit = trial_merit;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            dt *= 0.1;
            if (dt < 1e-30) {
                out.message = "pseudo-time step collapsed";
                break;
            }
        }
        record(out, out.iters, res, params.log_every);
    }
    out.u = std::move(u);
    finish(out, params, res);
    if (out.message.empty()) out.message = out.converged ? "converged" : "maximum iterations reached";
    return out;
}

}  // namespace

void SolveParams::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("solver tol must be positive");
    if (max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
    if (!(pseudo_dt > 0.0 && pseudo_dt <= 1.0)) throw InvalidArgument("pseudo_dt must lie in (0, 1]");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
}

double explicit_step_bound(const DiscreteProblem& p, const GridFunction& u) {
    const double h = p.grid().min_spacing();
    const double d = p.grid().dim();
    const double lambda = std::max(p.op().diagonal_bound(), 0.0);
    const double sigma = max_viscosity(p, u);
    const double denom = 2.0 * d * lambda + h * sigma * d + h * h * p.zero_order();
    return denom > 0.0 ? h * h / denom : 1.0;
}

GridFunction boundary_interpolant(const GridFunction& boundary) {
    const Grid& g = boundary.grid();
    GridFunction u = boundary;
    if (g.dim() == 1) {
        const int n = g.cells(0);
        const double left = boundary[0];
        const double right = boundary[static_cast<std::size_t>(n)];
        for (int i = 1; i < n; ++i) {
            const double s = static_cast<double>(i) / n;
            u[static_cast<std::size_t>(i)] = (1.0 - s) * left + s * right;
        }
        return u;
    }
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    auto b = [&](int i, int j) { return boundary[g.flat(i, j)]; };
    for (int i = 1; i < nx; ++i) {
        const double s = static_cast<double>(i) / nx;
        for (int j = 1; j < ny; ++j) {
            const double t = static_cast<double>(j) / ny;
            const double edges = (1 - s) * b(0, j) + s * b(nx, j) + (1 - t) * b(i, 0) + t * b(i, ny);
            const double corners = (1 - s) * (1 - t) * b(0, 0) + s * (1 - t) * b(nx, 0) +
                                   (1 - s) * t * b(0, ny) + s * t * b(nx, ny);
            u[g.flat(i, j)] = edges - corners;
        }
    }
    return u;
}

SolveOutcome solve_dirichlet(const DiscreteProblem& p, const SolveParams& params,
                             std::optional<GridFunction> u0) {
    params.validate();
    GridFunction u = u0 ? std::move(*u0) : boundary_interpolant(p.boundary());
    if (!(u.grid() == p.grid())) throw DimensionMismatch("initial guess lives on a different grid");
    if (!u.all_finite()) throw NonFiniteError("initial guess is not finite");
    impose_boundary(p, u);
    return params.method == PseudoTimeMethod::Implicit ? solve_implicit(p, params, std::move(u))
                                                       : solve_explicit(p, params, std::move(u));
}

CheckReport comparison_check(const DiscreteProblem& p, const GridFunction& u, const GridFunction& v,
                             double premise_tol) {
    CheckReport report;
    report.name = "comparison";
    report.tolerance = 1e-9;
    report.n_samples = static_cast<int>(u.size());
    const Grid& g = p.grid();
    std::string premise;
    if (!(p.zero_order() > 0.0)) premise = "zero_order must be positive";
    if (premise.empty()) {
        const GridFunction ru = discrete_residual(p, u);
        const GridFunction rv = discrete_residual(p, v);
        for (std::size_t k = 0; k < g.node_count() && premise.empty(); ++k) {
            if (ru[k] > premise_tol) premise = "u is not a discrete subsolution";
            else if (rv[k] < -premise_tol) premise = "v is not a discrete supersolution";
            else if (g.is_boundary(k) && u[k] > v[k]) premise = "u exceeds v on the boundary";
            if (!premise.empty()) report.witness = {static_cast<double>(k), ru[k], rv[k], u[k], v[k]};
        }
    }
    if (!premise.empty()) {
        report.premise_violated = true;
        report.passed = false;
        report.note = "premise_violated: " + premise;
        return report;
    }
    WorstCase wc;
    for (std::size_t k = 0; k < u.size(); ++k) {
        wc.offer(u[k] - v[k], [&] { return std::vector<double>{static_cast<double>(k), u[k], v[k]}; });
    }
    report.worst_margin = wc.worst();
    report.witness = wc.witness();
    report.passed = report.worst_margin <= report.tolerance;
    report.note = "witness = (node, u, v); margin = max(u - v)";
    return report;
}

void write_history_csv(std::ostream& out, const SolveOutcome& outcome) {
    out << "iter,residual\n";
    char buf[48];
    for (const auto& [iter, r] : outcome.residual_history) {
        std::snprintf(buf, sizeof buf, "%.17g", r);
        out << iter << ',' << buf << '\n';
    }
}

}  // namespace hjfb
