#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <hjfb/elliptic_operator.hpp>
#include <hjfb/free_boundary.hpp>
#include <hjfb/grid.hpp>
#include <hjfb/hamiltonian.hpp>
#include <hjfb/solver.hpp>

#include "expression.hpp"

namespace hjfb::cli {

/// Malformed, incomplete or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OperatorSpec {
    /// negative_trace | bellman | pucci_minus | pucci_plus | weighted_trace
    std::string type = "negative_trace";
    std::optional<double> c_f;
    /// bellman: list of d x d matrices.
    std::vector<std::vector<std::vector<double>>> family;
    /// pucci: ellipticity bounds.
    double lower = 1.0;
    double upper = 1.0;
    /// weighted_trace: constant d x d matrix, or diagonal entries as expressions.
    std::vector<std::vector<double>> matrix;
    std::vector<Expression> diagonal;
    std::optional<double> diagonal_bound;
};

struct HamiltonianSpec {
    /// power: a(x) (1 + |p|^2)^(m/2) + V(x);  pure_power: coef |p|^m
    std::string type = "power";
    Expression a = Expression::constant(1.0);
    Expression v = Expression::constant(0.0);
    double coef = 1.0;
    double m = 3.0;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<double> c3;
    std::optional<double> lip_a;
    std::optional<double> lip_v;
};

struct ProblemConfig {
    std::vector<double> lower;
    std::vector<double> upper;
    std::array<int, 2> cells{128, 128};
    OperatorSpec op;
    HamiltonianSpec hamiltonian;
    Expression source = Expression::constant(0.0);
    Expression boundary = Expression::constant(0.0);
    double zero_order = 0.0;
    /// Reference solution; enables error reporting.
    std::optional<Expression> exact;
    /// Cells per axis of the grids in a convergence study (requires exact).
    std::vector<int> convergence_study;
};

struct TwoPhaseConfig {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    std::vector<double> eps_schedule = default_eps_schedule();
    FixedPointParams fixed_point;
    bool warm_start = true;
    std::optional<double> zero_band;
    std::optional<double> band_tol;
};

struct RegularityConfig {
    std::optional<std::string> solution;
    double margin = 0.1;
    std::optional<double> c_dim;
    /// Extra Hölder seminorm evaluated at this exponent.
    std::optional<double> gamma;
    int barrier_samples = 1000;
};

struct VerifyConfig {
    int n_samples = 10000;
    std::uint64_t seed = 42;
    /// Defaults to the problem operator / Hamiltonian.
    std::vector<OperatorSpec> operators;
    std::vector<HamiltonianSpec> hamiltonians;
};

struct RunConfig {
    ProblemConfig problem;
    SolveParams solver;
    std::optional<TwoPhaseConfig> two_phase;
    RegularityConfig regularity;
    VerifyConfig verify;
    std::string output_directory = "out";
};

/// Parses a JSON document; every object rejects keys it does not know.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

struct Overrides {
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

[[nodiscard]] int dimension(const ProblemConfig& p);
Box make_box(const ProblemConfig& p);
Grid make_grid(const ProblemConfig& p);
Grid make_grid(const ProblemConfig& p, int cells_per_axis);
ScalarField make_field(const Expression& e, int dim);
EllipticOperator make_operator(const OperatorSpec& s, int dim);
Hamiltonian make_hamiltonian(const HamiltonianSpec& s, const Box& box);

/// Human-readable list of defaults, shown by --help.
std::string defaults_summary();

}  // namespace hjfb::cli
