#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <hjfb/errors.hpp>

namespace hjfb::cli {

namespace {

using nlohmann::json;

/// Object reader that remembers which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "must be an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(where(key) + " " + what);
    }

    [[nodiscard]] std::string where(const std::string& key) const {
        return key.empty() ? path_ : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    Reader child(const std::string& key) { return Reader(raw(key), where(key)); }

    template <class T>
    bool read(const std::string& key, T& out) {
        if (!has(key)) return false;
        const json& v = raw(key);
        out = convert<T>(v, key);
        return true;
    }

    template <class T>
    bool read(const std::string& key, std::optional<T>& out) {
        if (!has(key)) return false;
        out = convert<T>(raw(key), key);
        return true;
    }

    template <class T>
    T require(const std::string& key) {
        if (!has(key)) fail(key, "is required");
        return convert<T>(raw(key), key);
    }

    std::optional<Expression> field(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return to_expression(raw(key), where(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(it.key(), "is not a recognized key");
        }
    }

    static Expression to_expression(const json& v, const std::string& where) {
        if (v.is_number()) return Expression::constant(v.get<double>());
        if (v.is_string()) {
            try {
                return Expression::parse(v.get<std::string>());
            } catch (const ExpressionError& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
        throw ConfigError(where + " must be a number or an expression string");
    }

private:
    template <class T>
    T convert(const json& v, const std::string& key) const {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail(key, "must be a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) fail(key, "must be an integer");
            const auto i = v.get<long long>();
            if (i < INT32_MIN || i > INT32_MAX) fail(key, "is out of range");
            return static_cast<int>(i);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) fail(key, "must be a nonnegative integer");
            return v.get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) fail(key, "must be a number");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail(key, "must be a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) fail(key, "must be an array of numbers");
            std::vector<double> out;
            for (const auto& e : v) {
                if (!e.is_number()) fail(key, "must be an array of numbers");
                out.push_back(e.get<double>());
            }
            return out;
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
            if (!v.is_array()) fail(key, "must be an array of integers");
            std::vector<int> out;
            for (const auto& e : v) {
                if (!e.is_number_integer()) fail(key, "must be an array of integers");
                out.push_back(e.get<int>());
            }
            return out;
        } else {
            static_assert(sizeof(T) == 0, "unsupported config type");
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<std::vector<double>> read_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nonempty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : v) {
        if (!row.is_array()) throw ConfigError(where + " rows must be arrays of numbers");
        std::vector<double> r;
        for (const auto& e : row) {
            if (!e.is_number()) throw ConfigError(where + " entries must be numbers");
            r.push_back(e.get<double>());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

OperatorSpec parse_operator(Reader r) {
    OperatorSpec s;
    s.type = r.require<std::string>("type");
    r.read("c_f", s.c_f);
    if (s.type == "negative_trace") {
    } else if (s.type == "bellman") {
        if (!r.has("family")) r.fail("family", "is required for bellman");
        const json& fam = r.raw("family");
        if (!fam.is_array() || fam.empty()) r.fail("family", "must be a nonempty array of matrices");
        for (std::size_t k = 0; k < fam.size(); ++k) {
            s.family.push_back(read_matrix(fam[k], r.where("family[" + std::to_string(k) + "]")));
        }
    } else if (s.type == "pucci_minus" || s.type == "pucci_plus") {
        s.lower = r.require<double>("lower");
        s.upper = r.require<double>("upper");
    } else if (s.type == "weighted_trace") {
        const bool has_matrix = r.has("matrix");
        const bool has_diag = r.has("diagonal");
        if (has_matrix == has_diag) r.fail("", "needs exactly one of 'matrix' or 'diagonal'");
        if (has_matrix) {
            s.matrix = read_matrix(r.raw("matrix"), r.where("matrix"));
        } else {
            const json& d = r.raw("diagonal");
            if (!d.is_array() || d.empty()) r.fail("diagonal", "must be a nonempty array");
            for (std::size_t k = 0; k < d.size(); ++k) {
                s.diagonal.push_back(Reader::to_expression(d[k], r.where("diagonal[" + std::to_string(k) + "]")));
            }
            if (!s.c_f) r.fail("c_f", "is required for a weighted_trace with a diagonal field");
            r.read("diagonal_bound", s.diagonal_bound);
        }
    } else {
        r.fail("type", "must be one of negative_trace, bellman, pucci_minus, pucci_plus, weighted_trace");
    }
    r.finish();
    return s;
}

HamiltonianSpec parse_hamiltonian(Reader r) {
    HamiltonianSpec s;
    s.type = r.require<std::string>("type");
    s.m = r.require<double>("m");
    if (s.type == "power") {
        if (auto a = r.field("a")) s.a = *a;
        if (auto v = r.field("v")) s.v = *v;
        r.read("c1", s.c1);
        r.read("c2", s.c2);
        r.read("c3", s.c3);
        r.read("lip_a", s.lip_a);
        r.read("lip_v", s.lip_v);
    } else if (s.type == "pure_power") {
        r.read("coef", s.coef);
    } else {
        r.fail("type", "must be one of power, pure_power");
    }
    r.finish();
    return s;
}

ProblemConfig parse_problem(Reader r) {
    ProblemConfig p;
    {
        if (!r.has("domain")) r.fail("domain", "is required");
        Reader d = r.child("domain");
        p.lower = d.require<std::vector<double>>("lower");
        p.upper = d.require<std::vector<double>>("upper");
        d.finish();
        if (p.lower.size() != p.upper.size() || p.lower.empty() || p.lower.size() > 2) {
            d.fail("", "needs lower and upper of equal length 1 or 2");
        }
    }
    if (r.has("grid")) {
        Reader g = r.child("grid");
        if (!g.has("n")) g.fail("n", "is required");
        const json& n = g.raw("n");
        if (n.is_number_integer()) {
            p.cells = {n.get<int>(), n.get<int>()};
        } else if (n.is_array() && n.size() == p.lower.size() &&
                   std::all_of(n.begin(), n.end(), [](const json& e) { return e.is_number_integer(); })) {
            p.cells = {n[0].get<int>(), n.size() > 1 ? n[1].get<int>() : n[0].get<int>()};
        } else {
            g.fail("n", "must be an integer or one integer per axis");
        }
        g.finish();
    }
    if (r.has("operator")) p.op = parse_operator(r.child("operator"));
    if (r.has("hamiltonian")) p.hamiltonian = parse_hamiltonian(r.child("hamiltonian"));
    if (auto f = r.field("source")) p.source = *f;
    if (auto g = r.field("boundary")) p.boundary = *g;
    r.read("zero_order", p.zero_order);
    p.exact = r.field("exact");
    r.read("convergence_study", p.convergence_study);
    if (!p.convergence_study.empty() && !p.exact) {
        r.fail("convergence_study", "needs an 'exact' solution");
    }
    r.finish();
    if (p.lower.size() == 1) {
        std::vector<const Expression*> fields{&p.source, &p.boundary, &p.hamiltonian.a, &p.hamiltonian.v};
        if (p.exact) fields.push_back(&*p.exact);
        for (const Expression& e : p.op.diagonal) fields.push_back(&e);
        for (const Expression* e : fields) {
            if (e->uses_y()) r.fail("", "expression '" + e->text() + "' uses y in a 1D problem");
        }
    }
    return p;
}

SolveParams parse_solver(Reader r) {
    SolveParams s;
    r.read("tol", s.tol);
    r.read("max_iters", s.max_iters);
    r.read("pseudo_dt", s.pseudo_dt);
    r.read("damping", s.damping);
    r.read("log_every", s.log_every);
    std::string method;
    if (r.read("method", method)) {
        if (method == "implicit") s.method = PseudoTimeMethod::Implicit;
        else if (method == "explicit") s.method = PseudoTimeMethod::Explicit;
        else r.fail("method", "must be 'implicit' or 'explicit'");
    }
    r.finish();
    try {
        s.validate();
    } catch (const hjfb::InvalidArgument& e) {
        r.fail("", e.what());
    }
    return s;
}

TwoPhaseConfig parse_two_phase(Reader r, double default_damping) {
    TwoPhaseConfig t;
    t.lambda_plus = r.require<double>("lambda_plus");
    t.lambda_minus = r.require<double>("lambda_minus");
    r.read("eps_schedule", t.eps_schedule);
    t.fixed_point.damping = default_damping;
    r.read("damping", t.fixed_point.damping);
    r.read("tol_fp", t.fixed_point.tol_fp);
    r.read("max_outer", t.fixed_point.max_outer);
    r.read("warm_start", t.warm_start);
    r.read("zero_band", t.zero_band);
    r.read("band_tol", t.band_tol);
    r.finish();
    return t;
}

RegularityConfig parse_regularity(Reader r) {
    RegularityConfig c;
    r.read("solution", c.solution);
    r.read("margin", c.margin);
    r.read("c_dim", c.c_dim);
    r.read("gamma", c.gamma);
    r.read("barrier_samples", c.barrier_samples);
    r.finish();
    if (!(c.margin > 0.0)) r.fail("margin", "must be positive");
    if (c.gamma && !(*c.gamma > 0.0 && *c.gamma <= 1.0)) r.fail("gamma", "must lie in (0, 1]");
    if (c.c_dim && !(*c.c_dim > 0.0)) r.fail("c_dim", "must be positive");
    if (c.barrier_samples < 0) r.fail("barrier_samples", "must be >= 0");
    return c;
}

VerifyConfig parse_verify(Reader r) {
    VerifyConfig v;
    r.read("n_samples", v.n_samples);
    r.read("seed", v.seed);
    if (r.has("operators")) {
        const json& ops = r.raw("operators");
        if (!ops.is_array()) r.fail("operators", "must be an array");
        for (std::size_t k = 0; k < ops.size(); ++k) {
            v.operators.push_back(parse_operator(Reader(ops[k], r.where("operators[" + std::to_string(k) + "]"))));
        }
    }
    if (r.has("hamiltonians")) {
        const json& hs = r.raw("hamiltonians");
        if (!hs.is_array()) r.fail("hamiltonians", "must be an array");
        for (std::size_t k = 0; k < hs.size(); ++k) {
            v.hamiltonians.push_back(
                parse_hamiltonian(Reader(hs[k], r.where("hamiltonians[" + std::to_string(k) + "]"))));
        }
    }
    r.finish();
    if (v.n_samples < 1) r.fail("n_samples", "must be >= 1");
    return v;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    Reader root(doc, "config");
    RunConfig cfg;
    std::string description;
    root.read("description", description);
    if (!root.has("problem")) root.fail("problem", "is required");
    cfg.problem = parse_problem(root.child("problem"));
    if (root.has("solver")) cfg.solver = parse_solver(root.child("solver"));
    if (root.has("two_phase")) cfg.two_phase = parse_two_phase(root.child("two_phase"), cfg.solver.damping);
    if (root.has("regularity")) cfg.regularity = parse_regularity(root.child("regularity"));
    if (root.has("verify")) cfg.verify = parse_verify(root.child("verify"));
    if (root.has("output")) {
        Reader o = root.child("output");
        o.read("directory", cfg.output_directory);
        o.finish();
    }
    root.finish();
    if (cfg.verify.operators.empty()) cfg.verify.operators.push_back(cfg.problem.op);
    if (cfg.verify.hamiltonians.empty()) cfg.verify.hamiltonians.push_back(cfg.problem.hamiltonian);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.grid_n) cfg.problem.cells = {*o.grid_n, *o.grid_n};
    if (o.seed) cfg.verify.seed = *o.seed;
    if (o.out) cfg.output_directory = *o.out;
}

int dimension(const ProblemConfig& p) { return static_cast<int>(p.lower.size()); }

Box make_box(const ProblemConfig& p) {
    const int d = dimension(p);
    Vec lo(d);
    Vec hi(d);
    for (int k = 0; k < d; ++k) {
        lo[k] = p.lower[static_cast<std::size_t>(k)];
        hi[k] = p.upper[static_cast<std::size_t>(k)];
    }
    try {
        return Box(lo, hi);
    } catch (const hjfb::Error& e) {
        throw ConfigError(std::string("problem.domain: ") + e.what());
    }
}

Grid make_grid(const ProblemConfig& p) {
    try {
        return Grid(make_box(p), p.cells);
    } catch (const hjfb::Error& e) {
        throw ConfigError(std::string("problem.grid: ") + e.what());
    }
}

Grid make_grid(const ProblemConfig& p, int cells_per_axis) {
    ProblemConfig q = p;
    q.cells = {cells_per_axis, cells_per_axis};
    return make_grid(q);
}

ScalarField make_field(const Expression& e, int dim) {
    if (dim == 1 && e.uses_y()) throw ConfigError("expression '" + e.text() + "' uses y in a 1D problem");
    return [e, dim](const Vec& x) { return e.eval(x[0], dim > 1 ? x[1] : 0.0); };
}

namespace {

SymMat to_symmat(const std::vector<std::vector<double>>& rows, int dim, const std::string& what) {
    if (static_cast<int>(rows.size()) != dim) throw ConfigError(what + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
    std::vector<double> full;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != dim) {
            throw ConfigError(what + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
        }
        full.insert(full.end(), r.begin(), r.end());
    }
    return SymMat::from_full(dim, full);
}

}  // namespace

EllipticOperator make_operator(const OperatorSpec& s, int dim) {
    try {
        if (s.type == "negative_trace") return EllipticOperator::negative_trace(dim, s.c_f);
        if (s.type == "bellman") {
            std::vector<SymMat> fam;
            for (const auto& m : s.family) fam.push_back(to_symmat(m, dim, "bellman family member"));
            return EllipticOperator::bellman(std::move(fam), s.c_f);
        }
        if (s.type == "pucci_minus") return EllipticOperator::pucci_minus(dim, s.lower, s.upper, s.c_f);
        if (s.type == "pucci_plus") return EllipticOperator::pucci_plus(dim, s.lower, s.upper, s.c_f);
        if (!s.matrix.empty()) return EllipticOperator::weighted_trace(to_symmat(s.matrix, dim, "weighted_trace matrix"), s.c_f);
        if (static_cast<int>(s.diagonal.size()) != dim) {
            throw ConfigError("weighted_trace diagonal needs one expression per axis");
        }
        std::vector<ScalarField> diag;
        for (const auto& e : s.diagonal) diag.push_back(make_field(e, dim));
        MatrixField field = [diag](const Vec& x) {
            Vec entries(static_cast<int>(diag.size()));
            for (std::size_t k = 0; k < diag.size(); ++k) entries[static_cast<int>(k)] = diag[k](x);
            return SymMat::diagonal(entries);
        };
        return EllipticOperator::weighted_trace(dim, field, *s.c_f, s.diagonal_bound.value_or(*s.c_f));
    } catch (const hjfb::Error& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    }
}

Hamiltonian make_hamiltonian(const HamiltonianSpec& s, const Box& box) {
    try {
        if (s.type == "pure_power") return Hamiltonian::pure_power(box, s.coef, s.m);
        Hamiltonian::PowerOptions opts;
        opts.c1 = s.c1;
        opts.c2 = s.c2;
        opts.c3 = s.c3;
        opts.lip_a = s.lip_a;
        opts.lip_v = s.lip_v;
        return Hamiltonian::power(box, make_field(s.a, box.dim()), make_field(s.v, box.dim()), s.m, opts);
    } catch (const hjfb::Error& e) {
        throw ConfigError(std::string("hamiltonian: ") + e.what());
    }
}

std::string defaults_summary() {
    const SolveParams sp;
    const FixedPointParams fp;
    std::ostringstream o;
    o << "Config defaults (see docs/config.md):\n"
      << "  problem.grid.n = 128, operator = negative_trace,\n"
      << "  hamiltonian = power(a=1, v=0, m=3) when absent; m is required once the section is given\n"
      << "  source = 0, boundary = 0, zero_order = 0\n"
      << "  solver: tol = " << sp.tol << ", max_iters = " << sp.max_iters << ", pseudo_dt = " << sp.pseudo_dt
      << ", damping = " << sp.damping << ", log_every = " << sp.log_every << ", method = implicit\n"
      << "  two_phase: eps_schedule = 0.2 halving down to 1e-3, damping = solver.damping, tol_fp = "
      << fp.tol_fp << ", max_outer = " << fp.max_outer << ", warm_start = true,\n"
      << "             zero_band = max(1e-4, 10 tol), band_tol = 10 sqrt(h) (1 + |u|_inf)\n"
      << "  regularity: margin = 0.1, c_dim = 10 d, barrier_samples = 1000\n"
      << "  verify: n_samples = 10000, seed = 42, operators/hamiltonians = those of the problem\n"
      << "  output.directory = out\n";
    return o.str();
}

}  // namespace hjfb::cli
