#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hjfb/check_report.hpp"
#include "hjfb/elliptic_operator.hpp"
#include "hjfb/grid.hpp"

namespace hjfb {

/// Constants entering the explicit Hölder and Lipschitz bounds.
struct StructuralConstants {
    double m = 3.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double c_f = 1.0;
    /// Dimensional constant C(d); a free parameter, 10 d by default.
    double c_dim = 10.0;
    /// sup |f| over the grid.
    double f_norm = 0.0;

    /// Throws InvalidArgument unless m > 1, c1, c2, c3, c_f, c_dim > 0 and f_norm >= 0.
    void validate() const;

    /// Constants declared by F and H; c_dim defaults to 10 d.
    static StructuralConstants from(const EllipticOperator& op, const Hamiltonian& h,
                                    double f_norm = 0.0,
                                    std::optional<double> c_dim = std::nullopt);
};

/// H(p, x) - f(x) satisfies the growth bounds with C1 + |f| and C3 + |f|.
StructuralConstants absorb_source(const StructuralConstants& sc);

/// Hölder constant of the barrier argument; requires m > 2.
double theoretical_K(const StructuralConstants& sc);

struct LBranches {
    /// Absent for m <= 2 (gamma degenerates).
    std::optional<double> branch1;
    double branch2 = 0.0;
    double branch3 = 0.0;
    double value = 0.0;
};

LBranches theoretical_L_branches(const StructuralConstants& sc);
/// Lipschitz constant, max of the available branches.
double theoretical_L(const StructuralConstants& sc);

/// Nodes at least `margin` away from every face of the grid box.
std::vector<std::size_t> subdomain_nodes(const Grid& grid, double margin);

inline constexpr std::size_t kSeminormNodeCap = 5000;
inline constexpr std::uint64_t kSeminormSeed = 0x5eed5eedULL;

/// max over node pairs of the margin subdomain of |u(x) - u(y)| / |x - y|^gamma.
/// Above kSeminormNodeCap nodes a fixed-seed uniform subsample is used.
double holder_seminorm(const GridFunction& u, double margin, double gamma);

struct ModulusReport {
    /// Least-squares slope of log omega against log r, clipped to [0, 1.05];
    /// absent when omega vanishes identically.
    std::optional<double> gamma_hat;
    /// Exponent used for `seminorm`: gamma_hat clipped into (0, 1], or 1 when undefined.
    double seminorm_gamma = 1.0;
    double seminorm = 0.0;
    /// max omega(r) / r over the scales.
    double lipschitz_estimate = 0.0;
    std::size_t pair_count = 0;
    double margin = 0.0;
    /// (r_k, omega(r_k)) with r_k = 2^k h.
    std::vector<std::pair<double, double>> scales;
};

/// Requires at least four dyadic scales r_k = 2^k h <= (subdomain width) / 4.
ModulusReport estimate_exponent(const GridFunction& u, double margin);

struct BarrierSample {
    double value = 0.0;
    Vec gradient;
    SymMat hessian;
};

/// phi(y) = K |y - c|^gamma / (1/4 - |y - c|^2) with closed-form derivatives.
/// Requires 0 < |y - c| < 1/2.
BarrierSample barrier_phi(const Vec& center, double K, double gamma, const Vec& y);

/// Checks -C_F C(d) K + C2 gamma^m K^m / 4^m > f_norm + C1 and, at sampled y with
/// |y - c| in (0.01, 0.49) around the centre c of H's domain,
/// F(D^2 phi(y)) + H(D phi(y), y) > f_norm. K defaults to theoretical_K(sc).
/// parts = {scalar, pointwise}.
CheckReport barrier_supersolution_check(const EllipticOperator& op, const Hamiltonian& h,
                                        const StructuralConstants& sc, int n_samples,
                                        std::uint64_t seed, std::optional<double> K = std::nullopt);

}  // namespace hjfb
