#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hjfb: monotone finite-difference solvers for F(D^2u) + H(Du, x) = f and two-phase free boundary problems"};
    app.footer(hjfb::cli::defaults_summary() +
               "\nExit codes: 0 success, 1 failed check (verify), 2 config error, 3 nonconvergence, 4 non-finite iterate.\n"
               "HJ_THREADS caps the number of worker threads.");
    app.require_subcommand(1);

    std::string config;
    hjfb::cli::Overrides overrides;
    std::optional<std::string> solution;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config, "JSON config file")->required();
        sub->add_option("--grid-n", grid_n, "Override problem.grid.n (cells per axis)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Override verify.seed (also seeds the barrier sampler)");
        sub->add_option("--out", out, "Override output.directory");
    };
    add_common(app.add_subcommand("solve", "Solve the Dirichlet problem; writes solution.csv, residual.csv, summary.json"));
    add_common(app.add_subcommand("two-phase", "Run the eps-continuation for the two-phase problem; writes solution.csv, "
                                               "phases.csv, trace.json, band_check.json, summary.json"));
    auto* reg = app.add_subcommand("regularity", "Measure moduli of a solution file; writes modulus.json");
    add_common(reg);
    reg->add_option("--solution", solution, "Solution CSV (overrides regularity.solution)");
    add_common(app.add_subcommand("verify", "Sample the structural assumptions; writes verify.json"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hjfb::cli::exit_code::kConfigError;
    }
    overrides.grid_n = grid_n;
    overrides.seed = seed;
    overrides.out = out;
    const std::string command = app.get_subcommands().front()->get_name();
    return hjfb::cli::run_command(command, config, overrides, solution, std::cerr);
}
