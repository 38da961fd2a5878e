#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <hjfb/errors.hpp>
#include <hjfb/free_boundary.hpp>
#include <hjfb/regularity.hpp>
#include <hjfb/structural_checks.hpp>

namespace hjfb::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string exponent_key(double g) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", g);
    return buf;
}

fs::path output_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output_directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

json grid_json(const Grid& g) {
    json cells = json::array();
    json spacing = json::array();
    for (int a = 0; a < g.dim(); ++a) {
        cells.push_back(g.cells(a));
        spacing.push_back(g.spacing(a));
    }
    return {{"cells", cells}, {"spacing", spacing}, {"nodes", g.node_count()}};
}

struct BuiltProblem {
    DiscreteProblem problem;
    GridFunction source;
};

BuiltProblem build_problem(const ProblemConfig& pc, const Grid& grid) {
    const int d = grid.dim();
    const EllipticOperator op = make_operator(pc.op, d);
    const Hamiltonian h = make_hamiltonian(pc.hamiltonian, grid.box());
    GridFunction f = GridFunction::sample(grid, make_field(pc.source, d));
    GridFunction g = GridFunction::sample(grid, make_field(pc.boundary, d));
    try {
        return {DiscreteProblem(grid, op, h, f, g, pc.zero_order), f};
    } catch (const hjfb::InvalidArgument& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    } catch (const hjfb::DimensionMismatch& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    } catch (const hjfb::OutOfDomain& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    }
}

json solve_json(const SolveOutcome& s) {
    return {{"converged", s.converged},
            {"iters", s.iters},
            {"final_residual", s.final_residual},
            {"message", s.message},
            {"sup_norm", s.u.sup_norm()}};
}

}  // namespace

json to_json(const CheckReport& r) {
    json j = {{"name", r.name},
              {"passed", r.passed},
              {"worst_margin", r.worst_margin},
              {"tolerance", r.tolerance},
              {"witness", r.witness},
              {"note", r.note},
              {"n_samples", r.n_samples},
              {"seed", r.seed},
              {"premise_violated", r.premise_violated}};
    if (!r.parts.empty()) {
        json parts = json::array();
        for (const auto& p : r.parts) parts.push_back(to_json(p));
        j["parts"] = parts;
    }
    return j;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const ProblemConfig& pc = cfg.problem;
    const Grid grid = make_grid(pc);
    const BuiltProblem built = build_problem(pc, grid);
    const fs::path dir = output_dir(cfg);

    json summary = {{"command", "solve"}, {"grid", grid_json(grid)}};
    SolveOutcome out;
    try {
        out = solve_dirichlet(built.problem, cfg.solver);
    } catch (const NonFiniteError& e) {
        summary["converged"] = false;
        summary["message"] = e.what();
        write_json(dir / "summary.json", summary);
        log << "solve aborted: " << e.what() << '\n';
        return exit_code::kNonFinite;
    }
    {
        auto f = open_output(dir / "solution.csv");
        write_csv(f, out.u);
    }
    {
        auto f = open_output(dir / "residual.csv");
        write_history_csv(f, out);
    }
    summary.update(solve_json(out));
    bool all_converged = out.converged;
    if (pc.exact) {
        const GridFunction exact = GridFunction::sample(grid, make_field(*pc.exact, grid.dim()));
        summary["error_sup"] = out.u.distance(exact);
    }
    if (!pc.convergence_study.empty()) {
        json table = json::array();
        std::optional<double> prev_err;
        std::optional<double> prev_h;
        for (int n : pc.convergence_study) {
            const Grid g = make_grid(pc, n);
            const BuiltProblem b = build_problem(pc, g);
            SolveOutcome s;
            try {
                s = solve_dirichlet(b.problem, cfg.solver);
            } catch (const NonFiniteError& e) {
                summary["convergence_study"] = table;
                summary["message"] = std::string("convergence study aborted: ") + e.what();
                write_json(dir / "summary.json", summary);
                return exit_code::kNonFinite;
            }
            const GridFunction exact = GridFunction::sample(g, make_field(*pc.exact, g.dim()));
            const double err = s.u.distance(exact);
            const double h = g.max_spacing();
            json row = {{"n", n}, {"h", h}, {"error", err}, {"converged", s.converged}, {"iters", s.iters}};
            row["order"] = prev_err && err > 0.0 && *prev_err > 0.0
                               ? json(std::log(*prev_err / err) / std::log(*prev_h / h))
                               : json(nullptr);
            table.push_back(row);
            all_converged = all_converged && s.converged;
            log << "n=" << n << " error=" << err << '\n';
            prev_err = err;
            prev_h = h;
        }
        summary["convergence_study"] = table;
    }
    write_json(dir / "summary.json", summary);
    log << "solve: " << out.message << ", " << out.iters << " iterations, residual " << out.final_residual
        << '\n';
    return all_converged ? exit_code::kOk : exit_code::kNotConverged;
}

int cmd_two_phase(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.two_phase) throw ConfigError("config.two_phase is required for the two-phase command");
    const TwoPhaseConfig& tc = *cfg.two_phase;
    const ProblemConfig& pc = cfg.problem;
    if (!(pc.hamiltonian.m > 2.0)) throw ConfigError("two-phase problems need m > 2");
    const Grid grid = make_grid(pc);
    const int d = grid.dim();
    std::optional<TwoPhaseProblem> problem;
    try {
        problem.emplace(grid, make_operator(pc.op, d), make_hamiltonian(pc.hamiltonian, grid.box()),
                        tc.lambda_plus, tc.lambda_minus,
                        GridFunction::sample(grid, make_field(pc.boundary, d)), tc.eps_schedule,
                        tc.fixed_point, cfg.solver);
    } catch (const hjfb::Error& e) {
        throw ConfigError(std::string("two_phase: ") + e.what());
    }
    const TwoPhaseProblem& p = *problem;
    for (const auto& w : p.warnings()) log << "warning: " << w << '\n';
    const fs::path dir = output_dir(cfg);

    json summary = {{"command", "two-phase"}, {"grid", grid_json(grid)}, {"warnings", p.warnings()}};
    ContinuationResult res;
    try {
        res = epsilon_continuation(p, std::nullopt, tc.warm_start);
    } catch (const NonFiniteError& e) {
        summary["all_converged"] = false;
        summary["message"] = e.what();
        write_json(dir / "summary.json", summary);
        log << "two-phase aborted: " << e.what() << '\n';
        return exit_code::kNonFinite;
    }

    json trace = json::array();
    bool monotone = true;
    std::optional<double> last_delta;
    for (const auto& step : res.trace) {
        const auto& o = step.outcome;
        trace.push_back({{"eps", step.eps},
                         {"converged", o.converged},
                         {"outer_iters", o.outer_iters},
                         {"inner_iters", o.inner_iters},
                         {"fixed_point_residual", o.fixed_point_residual},
                         {"inner_residual", o.inner_residual},
                         {"self_consistent_residual", o.self_consistent_residual},
                         {"inner_failed", o.inner_failed},
                         {"mollifier_skipped", o.mollifier_skipped},
                         {"delta_to_previous", optional_number(step.delta_to_previous)},
                         {"history", o.history},
                         {"message", o.message}});
        if (step.delta_to_previous) {
            if (last_delta && !(*step.delta_to_previous < *last_delta)) monotone = false;
            last_delta = step.delta_to_previous;
        }
        log << "eps=" << step.eps << ": " << o.message << " (" << o.outer_iters << " outer)\n";
    }

    const double delta = tc.zero_band.value_or(default_zero_band(cfg.solver.tol));
    const PhaseDecomposition phases = extract_phases(res.u_star, delta);
    const CheckReport band = residual_band_check(p, res.u_star, delta, tc.band_tol);

    {
        auto f = open_output(dir / "solution.csv");
        write_csv(f, res.u_star);
    }
    {
        auto f = open_output(dir / "phases.csv");
        write_phase_csv(f, res.u_star, phases);
    }
    write_json(dir / "trace.json", trace);
    write_json(dir / "band_check.json", to_json(band));

    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (std::size_t k = 0; k < res.u_star.size(); ++k) {
        n_pos += phases.positive_mask[k];
        n_neg += phases.negative_mask[k];
    }
    summary["all_converged"] = res.all_converged;
    summary["failed_eps"] = optional_number(res.failed_eps);
    summary["deltas_monotone"] = monotone;
    summary["zero_band"] = delta;
    summary["band_check_passed"] = band.passed;
    summary["free_boundary_cells"] = phases.free_boundary_cells.size();
    summary["positive_nodes"] = n_pos;
    summary["negative_nodes"] = n_neg;
    summary["sup_norm"] = res.u_star.sup_norm();
    write_json(dir / "summary.json", summary);

    if (!res.all_converged) {
        log << "two-phase: outer iteration failed at eps=" << *res.failed_eps << '\n';
        return exit_code::kNotConverged;
    }
    if (!band.passed) {
        log << "two-phase: residual band check failed (margin " << band.worst_margin << ")\n";
        return exit_code::kNotConverged;
    }
    log << "two-phase: " << phases.free_boundary_cells.size() << " free-boundary cells\n";
    return exit_code::kOk;
}

int cmd_regularity(const RunConfig& cfg, const std::optional<std::string>& solution_path,
                   std::ostream& log) {
    const RegularityConfig& rc = cfg.regularity;
    const std::optional<std::string> path = solution_path ? solution_path : rc.solution;
    if (!path) throw ConfigError("regularity needs a solution file (regularity.solution or --solution)");
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open solution file '" + *path + "'");
    GridFunction u;
    try {
        u = read_csv(in);
    } catch (const hjfb::Error& e) {
        throw ConfigError("solution file '" + *path + "': " + e.what());
    }
    const ProblemConfig& pc = cfg.problem;
    const Grid& grid = u.grid();
    const int d = grid.dim();
    if (d != dimension(pc)) throw ConfigError("solution file dimension differs from problem.domain");
    const Box box = make_box(pc);
    if (!box.contains(grid.box().lower) || !box.contains(grid.box().upper)) {
        throw ConfigError("solution grid is not contained in problem.domain");
    }
    const EllipticOperator op = make_operator(pc.op, d);
    const Hamiltonian h = make_hamiltonian(pc.hamiltonian, box);
    const GridFunction f = GridFunction::sample(grid, make_field(pc.source, d));
    const double f_norm = f.sup_norm();

    ModulusReport mod;
    StructuralConstants sc;
    try {
        sc = StructuralConstants::from(op, h, f_norm, rc.c_dim);
        mod = estimate_exponent(u, rc.margin);
    } catch (const hjfb::InvalidArgument& e) {
        throw ConfigError(std::string("regularity: ") + e.what());
    }

    json scales = json::array();
    for (const auto& [r, omega] : mod.scales) scales.push_back({{"r", r}, {"omega", omega}});
    json report = {{"command", "regularity"},
                   {"solution", *path},
                   {"grid", grid_json(grid)},
                   {"margin", mod.margin},
                   {"gamma_hat", optional_number(mod.gamma_hat)},
                   {"seminorm_gamma", mod.seminorm_gamma},
                   {"seminorm", mod.seminorm},
                   {"lipschitz_estimate", mod.lipschitz_estimate},
                   {"pair_count", mod.pair_count},
                   {"scales", scales}};
    json seminorms = json::object();
    seminorms["1"] = holder_seminorm(u, rc.margin, 1.0);
    if (rc.gamma) seminorms[exponent_key(*rc.gamma)] = holder_seminorm(u, rc.margin, *rc.gamma);
    report["seminorms"] = seminorms;

    report["constants"] = {{"m", sc.m},
                           {"c1", sc.c1},
                           {"c2", sc.c2},
                           {"c3", sc.c3},
                           {"c_f", sc.c_f},
                           {"c_dim", sc.c_dim},
                           {"f_norm", sc.f_norm},
                           {"provenance",
                            {{"m", "declared"},
                             {"c1", h.power_info() && !pc.hamiltonian.c1 ? "derived from a, V" : "declared"},
                             {"c2", h.power_info() && !pc.hamiltonian.c2 ? "derived from a, V" : "declared"},
                             {"c3", h.power_info() && !pc.hamiltonian.c3 ? "derived from a, V" : "declared"},
                             {"c_f", pc.op.c_f ? "declared" : "operator default"},
                             {"c_dim", rc.c_dim ? "declared" : "default 10 d"},
                             {"f_norm", "measured on the grid"}}}};

    const LBranches lb = theoretical_L_branches(sc);
    const double u_norm = u.sup_norm();
    const double bound = lb.value * (1.0 + u_norm + f_norm);
    const double ratio = mod.lipschitz_estimate / bound;
    report["theoretical_L"] = lb.value;
    report["theoretical_L_branches"] = {{"branch1", optional_number(lb.branch1)},
                                        {"branch2", lb.branch2},
                                        {"branch3", lb.branch3}};
    report["u_norm"] = u_norm;
    report["lipschitz_bound"] = bound;
    report["lipschitz_ratio"] = ratio;
    report["lipschitz_consistent"] = ratio <= 1.0;

    if (sc.m > 2.0) {
        const double K = theoretical_K(sc);
        const double g = gamma_exponent(sc.m);
        const double semi = holder_seminorm(u, rc.margin, g);
        report["theoretical_K"] = K;
        report["gamma_m"] = g;
        seminorms[exponent_key(g)] = semi;
        report["seminorms"] = seminorms;
        if (rc.barrier_samples > 0) {
            bool ball_fits = true;
            for (int a = 0; a < d; ++a) ball_fits = ball_fits && (box.upper[a] - box.lower[a]) > 1.0;
            if (ball_fits) {
                report["barrier_check"] =
                    to_json(barrier_supersolution_check(op, h, sc, rc.barrier_samples, cfg.verify.seed));
            } else {
                report["barrier_check"] = nullptr;
                report["barrier_note"] = "domain does not contain the ball of radius 1/2 around its centre";
            }
        }
    } else {
        report["theoretical_K"] = nullptr;
        report["note"] = "m <= 2: K and the first branch of L are not defined";
    }

    const fs::path dir = output_dir(cfg);
    write_json(dir / "modulus.json", report);
    log << "regularity: gamma_hat=" << (mod.gamma_hat ? std::to_string(*mod.gamma_hat) : "undefined")
        << " lipschitz_ratio=" << ratio << '\n';
    return exit_code::kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const VerifyConfig& vc = cfg.verify;
    const int d = dimension(cfg.problem);
    const Box box = make_box(cfg.problem);
    bool all = true;

    json ops = json::array();
    for (const auto& spec : vc.operators) {
        const EllipticOperator op = make_operator(spec, d);
        const CheckReport reports[] = {check_a1(op, vc.n_samples, vc.seed),
                                       check_homogeneity(op, vc.n_samples, vc.seed),
                                       check_lemma_equivalence(op, vc.n_samples, vc.seed)};
        json checks = json::array();
        for (const auto& r : reports) {
            checks.push_back(to_json(r));
            all = all && r.passed;
            log << op.name() << ' ' << r.name << ": " << (r.passed ? "pass" : "FAIL") << '\n';
        }
        json entry = {{"name", op.name()}, {"c_f", op.c_f()}, {"checks", checks}};
        if (spec.type == "bellman") entry["satisfies_bellman_bound"] = op.satisfies_bellman_bound();
        ops.push_back(entry);
    }

    json hams = json::array();
    for (const auto& spec : vc.hamiltonians) {
        const Hamiltonian h = make_hamiltonian(spec, box);
        const CheckReport reports[] = {verify_growth(h, vc.n_samples, vc.seed),
                                       verify_x_continuity(h, vc.n_samples, vc.seed),
                                       verify_p_continuity(h, vc.n_samples, vc.seed)};
        json checks = json::array();
        for (const auto& r : reports) {
            checks.push_back(to_json(r));
            all = all && r.passed;
            log << h.name() << ' ' << r.name << ": " << (r.passed ? "pass" : "FAIL") << '\n';
        }
        hams.push_back({{"name", h.name()},
                        {"m", h.m()},
                        {"c1", h.c1()},
                        {"c2", h.c2()},
                        {"c3", h.c3()},
                        {"checks", checks}});
    }

    const json report = {{"command", "verify"},
                         {"n_samples", vc.n_samples},
                         {"seed", vc.seed},
                         {"passed", all},
                         {"operators", ops},
                         {"hamiltonians", hams}};
    write_json(output_dir(cfg) / "verify.json", report);
    return all ? exit_code::kOk : exit_code::kCheckFailed;
}

int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                const std::optional<std::string>& solution_path, std::ostream& log) {
    try {
        RunConfig cfg = load_config(config_path);
        apply_overrides(cfg, overrides);
        if (command == "solve") return cmd_solve(cfg, log);
        if (command == "two-phase") return cmd_two_phase(cfg, log);
        if (command == "regularity") return cmd_regularity(cfg, solution_path, log);
        if (command == "verify") return cmd_verify(cfg, log);
        log << "unknown command '" << command << "'\n";
        return exit_code::kConfigError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_code::kConfigError;
    } catch (const hjfb::InvalidArgument& e) {
        log << "config error: " << e.what() << '\n';
        return exit_code::kConfigError;
    }
}

}  // namespace hjfb::cli
