#include "hjfb/elliptic_operator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hjfb/errors.hpp"

namespace hjfb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be positive and finite");
    }
}

void check_pucci(double lower, double upper) {
    if (!(lower > 0.0) || !(lower <= upper)) {
        throw InvalidArgument("Pucci ellipticity constants need 0 < lambda <= Lambda");
    }
}

// Pucci operators written as -sum c_i e_i with branch-dependent weights.
double pucci_value(const SymMat& m, double pos_weight, double neg_weight) {
    double s = 0.0;
    for (const auto& p : sym_eigen(m)) s += (p.value > 0.0 ? pos_weight : neg_weight) * p.value;
    return -s;
}

SymMat pucci_gradient(const SymMat& m, double pos_weight, double neg_weight) {
    SymMat g(m.dim());
    for (const auto& p : sym_eigen(m)) {
        g -= (p.value > 0.0 ? pos_weight : neg_weight) * SymMat::outer(p.vector);
    }
    return g;
}

}  // namespace

EllipticOperator::EllipticOperator(int dim, double c_f, Kind kind)
    : dim_(dim), c_f_(c_f), kind_(std::move(kind)) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("operator dimension must be 1..3");
    require_positive(c_f, "C_F");
}

EllipticOperator EllipticOperator::negative_trace(int dim, std::optional<double> c_f) {
    return EllipticOperator(dim, c_f.value_or(static_cast<double>(dim)), NegativeTrace{});
}

EllipticOperator EllipticOperator::bellman(std::vector<SymMat> family, std::optional<double> c_f) {
    if (family.empty()) throw InvalidArgument("Bellman family must be nonempty");
    const int dim = family.front().dim();
    double largest = 0.0;
    for (const auto& a : family) {
        if (a.dim() != dim) throw DimensionMismatch("Bellman family members differ in dimension");
        if (min_eigenvalue(a) < -1e-12 * std::max(1.0, a.max_abs_entry())) {
            throw InvalidArgument("Bellman family members must be positive semi-definite");
        }
        largest = std::max(largest, spectral_norm(a));
    }
    const double declared = c_f.value_or(dim * largest);
    return EllipticOperator(dim, declared, Bellman{std::move(family)});
}

EllipticOperator EllipticOperator::pucci_minus(int dim, double lower, double upper,
                                               std::optional<double> c_f) {
    check_pucci(lower, upper);
    return EllipticOperator(dim, c_f.value_or(dim * upper), PucciMinus{lower, upper});
}

EllipticOperator EllipticOperator::pucci_plus(int dim, double lower, double upper,
                                              std::optional<double> c_f) {
    check_pucci(lower, upper);
    return EllipticOperator(dim, c_f.value_or(dim * upper), PucciPlus{lower, upper});
}

EllipticOperator EllipticOperator::weighted_trace(int dim, MatrixField coefficients, double c_f,
                                                  double diagonal_bound) {
    if (!coefficients) throw InvalidArgument("weighted trace needs a coefficient field");
    return EllipticOperator(dim, c_f, WeightedTrace{std::move(coefficients), diagonal_bound});
}

EllipticOperator EllipticOperator::weighted_trace(SymMat coefficients, std::optional<double> c_f) {
    const int dim = coefficients.dim();
    if (min_eigenvalue(coefficients) < -1e-12 * std::max(1.0, coefficients.max_abs_entry())) {
        throw InvalidArgument("weighted trace coefficients must be positive semi-definite");
    }
    double diag = 0.0;
    for (int k = 0; k < dim; ++k) diag = std::max(diag, coefficients(k, k));
    const double declared = c_f.value_or(std::max(dim * spectral_norm(coefficients), 1e-300));
    return EllipticOperator(dim, declared,
                            WeightedTrace{[coefficients](const Vec&) { return coefficients; }, diag});
}

EllipticOperator EllipticOperator::custom(int dim, std::function<double(const SymMat&)> fn,
                                          double c_f, std::string name, double diagonal_bound) {
    if (!fn) throw InvalidArgument("custom operator needs a callable");
    return EllipticOperator(dim, c_f, Custom{std::move(fn), std::move(name), diagonal_bound});
}

std::string EllipticOperator::name() const {
    return std::visit(overloaded{
                          [](const NegativeTrace&) -> std::string { return "negative_trace"; },
                          [](const Bellman&) -> std::string { return "bellman"; },
                          [](const PucciMinus&) -> std::string { return "pucci_minus"; },
                          [](const PucciPlus&) -> std::string { return "pucci_plus"; },
                          [](const WeightedTrace&) -> std::string { return "weighted_trace"; },
                          [](const Custom& c) -> std::string { return c.name; },
                      },
                      kind_);
}

double EllipticOperator::evaluate(const SymMat& m, const Vec& x) const {
    if (m.dim() != dim_) throw DimensionMismatch("operator/matrix dimension mismatch");
    return std::visit(
        overloaded{
            [&](const NegativeTrace&) { return -m.trace(); },
            [&](const Bellman& b) {
                double best = -b.family.front().frobenius_dot(m);
                for (std::size_t k = 1; k < b.family.size(); ++k) {
                    best = std::min(best, -b.family[k].frobenius_dot(m));
                }
                return best;
            },
            [&](const PucciMinus& p) { return pucci_value(m, p.upper, p.lower); },
            [&](const PucciPlus& p) { return pucci_value(m, p.lower, p.upper); },
            [&](const WeightedTrace& w) { return -w.coefficients(x).frobenius_dot(m); },
            [&](const Custom& c) { return c.fn(m); },
        },
        kind_);
}

double EllipticOperator::evaluate(const SymMat& m) const { return evaluate(m, Vec(dim_)); }

SymMat EllipticOperator::gradient(const SymMat& m, const Vec& x) const {
    if (m.dim() != dim_) throw DimensionMismatch("operator/matrix dimension mismatch");
    return std::visit(
        overloaded{
            [&](const NegativeTrace&) { return -SymMat::identity(dim_); },
            [&](const Bellman& b) {
                std::size_t active = 0;
                double best = -b.family.front().frobenius_dot(m);
                for (std::size_t k = 1; k < b.family.size(); ++k) {
                    const double v = -b.family[k].frobenius_dot(m);
                    if (v < best) {
                        best = v;
                        active = k;
                    }
                }
                return -b.family[active];
            },
            [&](const PucciMinus& p) { return pucci_gradient(m, p.upper, p.lower); },
            [&](const PucciPlus& p) { return pucci_gradient(m, p.lower, p.upper); },
            [&](const WeightedTrace& w) { return -w.coefficients(x); },
            [&](const Custom& c) {
                // Central differences on each independent entry.
                SymMat g(dim_);
                const double step = 1e-6 * std::max(1.0, m.max_abs_entry());
                for (int i = 0; i < dim_; ++i) {
                    for (int j = i; j < dim_; ++j) {
                        SymMat plus = m;
                        SymMat minus = m;
                        plus.set(i, j, m(i, j) + step);
                        minus.set(i, j, m(i, j) - step);
                        const double d = (c.fn(plus) - c.fn(minus)) / (2.0 * step);
                        // An off-diagonal perturbation moves two entries.
                        g.set(i, j, i == j ? d : 0.5 * d);
                    }
                }
                return g;
            },
        },
        kind_);
}

double EllipticOperator::diagonal_bound() const {
    return std::visit(overloaded{
                          [](const NegativeTrace&) { return 1.0; },
                          [&](const Bellman& b) {
                              double s = 0.0;
                              for (const auto& a : b.family) {
                                  for (int k = 0; k < dim_; ++k) s = std::max(s, a(k, k));
                              }
                              return s;
                          },
                          [](const PucciMinus& p) { return p.upper; },
                          [](const PucciPlus& p) { return p.upper; },
                          [](const WeightedTrace& w) { return w.diagonal_bound; },
                          [](const Custom& c) { return c.diagonal_bound; },
                      },
                      kind_);
}

bool EllipticOperator::axis_aligned(const std::vector<Vec>& sample_points) const {
    if (dim_ == 1) return true;
    return std::visit(overloaded{
                          [](const NegativeTrace&) { return true; },
                          [](const Bellman& b) {
                              return std::all_of(b.family.begin(), b.family.end(),
                                                 [](const SymMat& a) { return a.is_diagonal(); });
                          },
                          [](const PucciMinus& p) { return p.lower == p.upper; },
                          [](const PucciPlus& p) { return p.lower == p.upper; },
                          [&](const WeightedTrace& w) {
                              return std::all_of(sample_points.begin(), sample_points.end(),
                                                 [&](const Vec& x) {
                                                     return w.coefficients(x).is_diagonal();
                                                 });
                          },
                          [](const Custom&) { return false; },
                      },
                      kind_);
}

bool EllipticOperator::satisfies_bellman_bound() const {
    const auto* b = std::get_if<Bellman>(&kind_);
    if (b == nullptr) return true;
    const double bound = c_f_ / dim_;
    return std::all_of(b->family.begin(), b->family.end(), [&](const SymMat& a) {
        return spectral_norm(a) <= bound * (1.0 + 1e-12);
    });
}

double operator_eval(const EllipticOperator& op, const SymMat& m) { return op.evaluate(m); }

}  // namespace hjfb
