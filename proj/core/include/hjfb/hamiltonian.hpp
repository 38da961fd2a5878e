#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "hjfb/box.hpp"
#include "hjfb/check_report.hpp"
#include "hjfb/symmat.hpp"

namespace hjfb {

using ScalarField = std::function<double(const Vec& x)>;

/// First-order term H(p, x) with declared structural constants (m, C1, C2, C3):
///
///   -C1 + C2 |p|^m <= H(p,x) <= C3 (1 + |p|^m)
///   |H(p,x) - H(p,y)| <= (C3 |p|^m + C1) |x - y|
///   |H(p,x) - H(q,x)| <= C3 (|p| + |q| + 1)^(m-1) |p - q|
///
/// The Power family is H(p,x) = a(x) (1 + |p|^2)^(m/2) + V(x).
class Hamiltonian {
public:
    using Function = std::function<double(const Vec& p, const Vec& x)>;

    struct PowerOptions {
        std::optional<double> c1;
        std::optional<double> c2;
        std::optional<double> c3;
        /// Lipschitz constants of a and V; estimated on a lattice when absent.
        std::optional<double> lip_a;
        std::optional<double> lip_v;
    };

    /// Bounds of a and V found when the Power family was built.
    struct PowerInfo {
        double a_min;     // C_*
        double upper;     // C^* = max(sup a, sup V)
        double lip_a;
        double lip_v;
    };

    /// Samples a and V on the domain: requires inf a > 0 and V >= 0.
    ///
    /// Default constants (m' = m/2):
    ///   C1 = C^* + 2^m' Lip(a) + Lip(V)
    ///   C2 = C_*
    ///   C3 = 2^m' C^* + C^* + 2^m' Lip(a) + Lip(V)
    static Hamiltonian power(Box domain, ScalarField a, ScalarField v, double m,
                             const PowerOptions& options = {});
    static Hamiltonian power(Box domain, double a, double v, double m,
                             const PowerOptions& options = {});

    /// coef |p|^m with C1 = C2 = C3 = coef.
    static Hamiltonian pure_power(Box domain, double coef, double m);

    static Hamiltonian custom(Box domain, Function fn, double m, double c1, double c2, double c3,
                              std::string name, bool depends_on_x = true);

    /// Same H with different declared constants.
    [[nodiscard]] Hamiltonian with_constants(double c1, double c2, double c3) const;

    /// Throws OutOfDomain when x is outside the domain box.
    [[nodiscard]] double evaluate(const Vec& p, const Vec& x) const;
    double operator()(const Vec& p, const Vec& x) const { return evaluate(p, x); }

    /// dH/dp: analytic for Power, central differences otherwise.
    [[nodiscard]] Vec gradient_p(const Vec& p, const Vec& x) const;

    [[nodiscard]] int dim() const noexcept { return domain_.dim(); }
    [[nodiscard]] const Box& domain() const noexcept { return domain_; }
    [[nodiscard]] double m() const noexcept { return m_; }
    [[nodiscard]] double c1() const noexcept { return c1_; }
    [[nodiscard]] double c2() const noexcept { return c2_; }
    [[nodiscard]] double c3() const noexcept { return c3_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] bool depends_on_x() const noexcept { return depends_on_x_; }
    [[nodiscard]] const std::optional<PowerInfo>& power_info() const noexcept { return power_; }

private:
    Hamiltonian() = default;

    Box domain_;
    Function fn_;
    double m_ = 2.0;
    double c1_ = 1.0;
    double c2_ = 1.0;
    double c3_ = 1.0;
    std::string name_;
    bool depends_on_x_ = true;
    std::optional<PowerInfo> power_;
    ScalarField a_;
    ScalarField v_;
};

double h_eval(const Hamiltonian& h, const Vec& p, const Vec& x);

inline constexpr double kHamiltonianCheckTolerance = 1e-9;

/// |p| log-uniform in [1e-3, 50] (first sample p = 0), x uniform on the domain.
/// Violations are normalized by 1 + |H|. Witness = (p, x).
CheckReport verify_growth(const Hamiltonian& h, int n_samples, std::uint64_t seed);

/// Half the y samples are independent, half are x + offset with log-uniform length
/// down to 1e-6. Witness = (p, x, y).
CheckReport verify_x_continuity(const Hamiltonian& h, int n_samples, std::uint64_t seed);

/// Half the q samples are independent, half are p + small offset. Witness = (p, q, x).
CheckReport verify_p_continuity(const Hamiltonian& h, int n_samples, std::uint64_t seed);

/// (m - 2)/(m - 1); requires m > 2.
double gamma_exponent(double m);

}  // namespace hjfb
