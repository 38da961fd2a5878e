#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hjfb/symmat.hpp"

namespace hjfb {

/// x -> A(x), a symmetric coefficient field.
using MatrixField = std::function<SymMat(const Vec& x)>;

/// A second-order operator F : S(d) -> R in the non-increasing convention,
/// F(M) <= F(N) whenever M >= N, with a declared Lipschitz constant C_F.
///
/// Built-in kinds:
///   NegativeTrace   F(M) = -Tr(M)
///   Bellman         F(M) = min_a -Tr(A_a M)
///   PucciMinus      F(M) = -(Lambda sum e_i^+ - lambda sum e_i^-)   (inf over lambda <= A <= Lambda)
///   PucciPlus       F(M) = -(lambda sum e_i^+ - Lambda sum e_i^-)   (sup over lambda <= A <= Lambda)
///   WeightedTrace   F(M, x) = -Tr(A(x) M)
///   Custom          arbitrary callable; used for fixtures that are meant to
///                   break the structural assumptions.
class EllipticOperator {
public:
    struct NegativeTrace {};
    struct Bellman {
        std::vector<SymMat> family;
    };
    struct PucciMinus {
        double lower;
        double upper;
    };
    struct PucciPlus {
        double lower;
        double upper;
    };
    struct WeightedTrace {
        MatrixField coefficients;
        /// Bound on the diagonal of A(x), used for explicit step sizes.
        double diagonal_bound;
    };
    struct Custom {
        std::function<double(const SymMat&)> fn;
        std::string name;
        double diagonal_bound;
    };
    using Kind = std::variant<NegativeTrace, Bellman, PucciMinus, PucciPlus, WeightedTrace, Custom>;

    /// Default C_F = d.
    static EllipticOperator negative_trace(int dim, std::optional<double> c_f = std::nullopt);
    /// Family members must be positive semi-definite. Default C_F = d * max |A_a|, so
    /// the family sits exactly inside 0 <= A_a <= (C_F/d) I; a larger family
    /// against a declared C_F is accepted and reported by satisfies_bellman_bound().
    static EllipticOperator bellman(std::vector<SymMat> family,
                                    std::optional<double> c_f = std::nullopt);
    /// Default C_F = d * upper.
    static EllipticOperator pucci_minus(int dim, double lower, double upper,
                                        std::optional<double> c_f = std::nullopt);
    static EllipticOperator pucci_plus(int dim, double lower, double upper,
                                       std::optional<double> c_f = std::nullopt);
    /// C_F must be supplied; a field is only sampled, never bounded analytically.
    static EllipticOperator weighted_trace(int dim, MatrixField coefficients, double c_f,
                                           double diagonal_bound);
    /// Constant-coefficient -Tr(A M); C_F defaults to d * |A|.
    static EllipticOperator weighted_trace(SymMat coefficients,
                                           std::optional<double> c_f = std::nullopt);
    static EllipticOperator custom(int dim, std::function<double(const SymMat&)> fn, double c_f,
                                   std::string name, double diagonal_bound = 1.0);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double c_f() const noexcept { return c_f_; }
    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;

    /// F(M) at the point x (x only matters for WeightedTrace).
    [[nodiscard]] double evaluate(const SymMat& m, const Vec& x) const;
    [[nodiscard]] double evaluate(const SymMat& m) const;

    /// dF/dM at M: the symmetric G with F(M + dM) ~ F(M) + Tr(G dM). For the
    /// piecewise-linear built-ins this is -A of the active branch.
    [[nodiscard]] SymMat gradient(const SymMat& m, const Vec& x) const;

    /// Largest diagonal second-order coefficient, sup_x max_k A_kk.
    [[nodiscard]] double diagonal_bound() const;

    /// True iff every linearization -G is diagonal for every argument, i.e.
    /// the operator never couples axes (required by 2D central differencing).
    [[nodiscard]] bool axis_aligned(const std::vector<Vec>& sample_points) const;

    /// Bellman only: every family member satisfies |A_a| <= C_F/d.
    [[nodiscard]] bool satisfies_bellman_bound() const;

private:
    EllipticOperator(int dim, double c_f, Kind kind);

    int dim_;
    double c_f_;
    Kind kind_;
};

/// F(M) for operators that do not depend on x (x = origin otherwise).
double operator_eval(const EllipticOperator& op, const SymMat& m);

}  // namespace hjfb
