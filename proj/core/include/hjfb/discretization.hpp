#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>

#include "hjfb/elliptic_operator.hpp"
#include "hjfb/grid.hpp"
#include "hjfb/hamiltonian.hpp"

namespace hjfb {

struct OneSided {
    double minus;  // (u_i - u_{i-1}) / h
    double plus;   // (u_{i+1} - u_i) / h
};

/// Backward and forward differences at an interior node. Throws InvalidArgument
/// on boundary nodes.
OneSided gradient_one_sided(const GridFunction& u, std::size_t node, int axis);

/// Central second differences; the 2D off-diagonal uses the 4-point cross
/// stencil. Exact for quadratics.
SymMat hessian_central(const GridFunction& u, std::size_t node);

/// Lax-Friedrichs flux H((d- + d+)/2, x) - (sigma/2) sum_k (d+_k - d-_k).
/// Monotone (non-increasing in d+, non-decreasing in d-) when sigma bounds
/// |dH/dp| on the hull of the one-sided gradients. Throws on sigma <= 0.
double numerical_hamiltonian_lf(const Hamiltonian& h, const Vec& d_minus, const Vec& d_plus,
                                const Vec& x, double sigma);

/// 1.1 times the largest |dH/dp| over the corners and centre of the box
/// spanned by d- and d+; never below kMinViscosity.
double select_viscosity(const Hamiltonian& h, const Vec& d_minus, const Vec& d_plus, const Vec& x);

inline constexpr double kViscositySafety = 1.1;
inline constexpr double kMinViscosity = 1e-10;

/// zero_order u + F(D^2 u) + H(Du, x) = f in the interior, u = g on the boundary.
class DiscreteProblem {
public:
    /// Validates grid agreement, zero_order >= 0, and in 2D rejects operators
    /// that couple axes (the cross stencil is not monotone).
    DiscreteProblem(Grid grid, EllipticOperator op, Hamiltonian h, GridFunction source,
                    GridFunction boundary, double zero_order = 0.0);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const EllipticOperator& op() const noexcept { return op_; }
    [[nodiscard]] const Hamiltonian& hamiltonian() const noexcept { return h_; }
    [[nodiscard]] const GridFunction& source() const noexcept { return source_; }
    [[nodiscard]] const GridFunction& boundary() const noexcept { return boundary_; }
    [[nodiscard]] double zero_order() const noexcept { return zero_order_; }

    [[nodiscard]] DiscreteProblem with_source(GridFunction source) const;
    [[nodiscard]] DiscreteProblem with_boundary(GridFunction boundary) const;

private:
    Grid grid_;
    EllipticOperator op_;
    Hamiltonian h_;
    GridFunction source_;
    GridFunction boundary_;
    double zero_order_;
};

/// One-sided gradients at an interior node, packed per axis.
std::pair<Vec, Vec> one_sided_gradients(const GridFunction& u, std::size_t node);

/// Residual at one node. `sigma` overrides the per-node viscosity.
double residual_at(const DiscreteProblem& p, const GridFunction& u, std::size_t node,
                   std::optional<double> sigma = std::nullopt);

/// Residual at every node; the solver drives this to zero.
GridFunction discrete_residual(const DiscreteProblem& p, const GridFunction& u);

/// F(D^2 u) + H_LF(Du, x) at the interior nodes (no zero-order or source term);
/// boundary nodes carry 0.
GridFunction operator_values(const DiscreteProblem& p, const GridFunction& u);

/// Residual at a node together with its derivatives with respect to the node
/// values it reads; the viscosity is frozen at its selected value.
struct NodeLinearization {
    static constexpr std::size_t kMaxEntries = 9;
    double value = 0.0;
    double viscosity = 0.0;
    std::array<std::pair<std::size_t, double>, kMaxEntries> entries{};
    std::size_t count = 0;

    void add(std::size_t node, double derivative);
};

NodeLinearization linearize_at(const DiscreteProblem& p, const GridFunction& u, std::size_t node);

}  // namespace hjfb
