#include "hjfb/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hjfb/errors.hpp"
#include "hjfb/parallel.hpp"

namespace hjfb {

namespace {

void require_interior(const GridFunction& u, std::size_t node) {
    if (node >= u.size()) throw InvalidArgument("node index out of range");
    if (u.grid().is_boundary(node)) throw InvalidArgument("stencil requested at a boundary node");
}

}  // namespace

OneSided gradient_one_sided(const GridFunction& u, std::size_t node, int axis) {
    require_interior(u, node);
    const Grid& g = u.grid();
    if (axis < 0 || axis >= g.dim()) throw InvalidArgument("axis out of range");
    const double h = g.spacing(axis);
    const double c = u[node];
    return {(c - u[g.neighbour(node, axis, -1)]) / h, (u[g.neighbour(node, axis, +1)] - c) / h};
}

std::pair<Vec, Vec> one_sided_gradients(const GridFunction& u, std::size_t node) {
    const int d = u.grid().dim();
    Vec minus(d);
    Vec plus(d);
    for (int k = 0; k < d; ++k) {
        const OneSided s = gradient_one_sided(u, node, k);
        minus[k] = s.minus;
        plus[k] = s.plus;
    }
    return {minus, plus};
}

SymMat hessian_central(const GridFunction& u, std::size_t node) {
    require_interior(u, node);
    const Grid& g = u.grid();
    const int d = g.dim();
    SymMat m(d);
    const double c = u[node];
    for (int k = 0; k < d; ++k) {
        const double h = g.spacing(k);
        m.set(k, k, (u[g.neighbour(node, k, +1)] - 2.0 * c + u[g.neighbour(node, k, -1)]) / (h * h));
    }
    if (d == 2) {
        const std::size_t xp = g.neighbour(node, 0, +1);
        const std::size_t xm = g.neighbour(node, 0, -1);
        const double cross = u[g.neighbour(xp, 1, +1)] - u[g.neighbour(xp, 1, -1)] -
                             u[g.neighbour(xm, 1, +1)] + u[g.neighbour(xm, 1, -1)];
        m.set(0, 1, cross / (4.0 * g.spacing(0) * g.spacing(1)));
    }
    return m;
}

double numerical_hamiltonian_lf(const Hamiltonian& h, const Vec& d_minus, const Vec& d_plus,
                                const Vec& x, double sigma) {
    if (sigma <= 0.0) throw InvalidArgument("Lax-Friedrichs viscosity must be positive");
    const Vec mid = 0.5 * (d_minus + d_plus);
    double spread = 0.0;
    for (int k = 0; k < mid.dim(); ++k) spread += d_plus[k] - d_minus[k];
    return h.evaluate(mid, x) - 0.5 * sigma * spread;
}

double select_viscosity(const Hamiltonian& h, const Vec& d_minus, const Vec& d_plus, const Vec& x) {
    const int d = d_minus.dim();
    double slope = h.gradient_p(0.5 * (d_minus + d_plus), x).norm();
    for (int corner = 0; corner < (1 << d); ++corner) {
        Vec p(d);
        for (int k = 0; k < d; ++k) p[k] = (corner >> k) & 1 ? d_plus[k] : d_minus[k];
        const double s = h.gradient_p(p, x).norm();
        slope = std::isnan(s) ? s : std::max(slope, s);
        if (std::isnan(slope)) break;
    }
    if (std::isnan(slope)) return slope;
    return std::max(kViscositySafety * slope, kMinViscosity);
}

DiscreteProblem::DiscreteProblem(Grid grid, EllipticOperator op, Hamiltonian h,
                                 GridFunction source, GridFunction boundary, double zero_order)
    : grid_(std::move(grid)),
      op_(std::move(op)),
      h_(std::move(h)),
      source_(std::move(source)),
      boundary_(std::move(boundary)),
      zero_order_(zero_order) {
    if (op_.dim() != grid_.dim()) throw DimensionMismatch("operator dimension differs from grid");
    if (h_.dim() != grid_.dim()) throw DimensionMismatch("Hamiltonian dimension differs from grid");
    if (!(source_.grid() == grid_) || !(boundary_.grid() == grid_)) {
        throw DimensionMismatch("source and boundary data must live on the problem grid");
    }
    if (!h_.domain().contains(grid_.box().lower) || !h_.domain().contains(grid_.box().upper)) {
        throw OutOfDomain("grid box is not contained in the Hamiltonian domain");
    }
    if (!(zero_order_ >= 0.0) || !std::isfinite(zero_order_)) {
        throw InvalidArgument("zero-order coefficient must be finite and >= 0");
    }
    if (!source_.all_finite() || !boundary_.all_finite()) {
        throw InvalidArgument("source and boundary data must be finite");
    }
    if (grid_.dim() == 2) {
        std::vector<Vec> nodes;
        nodes.reserve(grid_.node_count());
        for (std::size_t k = 0; k < grid_.node_count(); ++k) nodes.push_back(grid_.coordinates(k));
        if (!op_.axis_aligned(nodes)) {
            throw InvalidArgument(
                "2D problems need an operator without cross-derivative coupling (diagonal A)");
        }
    }
}

DiscreteProblem DiscreteProblem::with_source(GridFunction source) const {
    return DiscreteProblem(grid_, op_, h_, std::move(source), boundary_, zero_order_);
}

DiscreteProblem DiscreteProblem::with_boundary(GridFunction boundary) const {
    return DiscreteProblem(grid_, op_, h_, source_, std::move(boundary), zero_order_);
}

namespace {

double interior_operator(const DiscreteProblem& p, const GridFunction& u, std::size_t node,
                         std::optional<double> sigma) {
    const Vec x = p.grid().coordinates(node);
    const auto [minus, plus] = one_sided_gradients(u, node);
    const double visc = sigma.value_or(select_viscosity(p.hamiltonian(), minus, plus, x));
    return p.op().evaluate(hessian_central(u, node), x) +
           numerical_hamiltonian_lf(p.hamiltonian(), minus, plus, x, visc);
}

}  // namespace

double residual_at(const DiscreteProblem& p, const GridFunction& u, std::size_t node,
                   std::optional<double> sigma) {
    if (p.grid().is_boundary(node)) return u[node] - p.boundary()[node];
    return p.zero_order() * u[node] + interior_operator(p, u, node, sigma) - p.source()[node];
}

GridFunction discrete_residual(const DiscreteProblem& p, const GridFunction& u) {
    if (!(u.grid() == p.grid())) throw DimensionMismatch("iterate lives on a different grid");
    GridFunction r(p.grid());
    parallel_for(u.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) r[k] = residual_at(p, u, k);
    });
    return r;
}

GridFunction operator_values(const DiscreteProblem& p, const GridFunction& u) {
    if (!(u.grid() == p.grid())) throw DimensionMismatch("iterate lives on a different grid");
    GridFunction r(p.grid());
    parallel_for(u.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            r[k] = p.grid().is_boundary(k) ? 0.0 : interior_operator(p, u, k, std::nullopt);
        }
    });
    return r;
}

void NodeLinearization::add(std::size_t node, double derivative) {
    for (std::size_t k = 0; k < count; ++k) {
        if (entries[k].first == node) {
            entries[k].second += derivative;
            return;
        }
    }
    entries[count++] = {node, derivative};
}

NodeLinearization linearize_at(const DiscreteProblem& p, const GridFunction& u, std::size_t node) {
    NodeLinearization lin;
    const Grid& g = p.grid();
    if (g.is_boundary(node)) {
        lin.value = u[node] - p.boundary()[node];
        lin.add(node, 1.0);
        return lin;
    }
    const int d = g.dim();
    const Vec x = g.coordinates(node);
    const auto [minus, plus] = one_sided_gradients(u, node);
    const double visc = select_viscosity(p.hamiltonian(), minus, plus, x);
    const SymMat hess = hessian_central(u, node);
    lin.viscosity = visc;
    lin.value = p.zero_order() * u[node] + p.op().evaluate(hess, x) +
                numerical_hamiltonian_lf(p.hamiltonian(), minus, plus, x, visc) - p.source()[node];

    const SymMat dfdm = p.op().gradient(hess, x);
    const Vec hp = p.hamiltonian().gradient_p(0.5 * (minus + plus), x);

    lin.add(node, p.zero_order());
    for (int k = 0; k < d; ++k) {
        const double h = g.spacing(k);
        const double second = dfdm(k, k) / (h * h);
        const double d_plus = 0.5 * (hp[k] - visc);   // dLF / d(d+_k)
        const double d_minus = 0.5 * (hp[k] + visc);  // dLF / d(d-_k)
        lin.add(node, -2.0 * second + (d_minus - d_plus) / h);
        lin.add(g.neighbour(node, k, +1), second + d_plus / h);
        lin.add(g.neighbour(node, k, -1), second - d_minus / h);
    }
    if (d == 2 && dfdm(0, 1) != 0.0) {
        const double c = 2.0 * dfdm(0, 1) / (4.0 * g.spacing(0) * g.spacing(1));
        const std::size_t xp = g.neighbour(node, 0, +1);
        const std::size_t xm = g.neighbour(node, 0, -1);
        lin.add(g.neighbour(xp, 1, +1), c);
        lin.add(g.neighbour(xp, 1, -1), -c);
        lin.add(g.neighbour(xm, 1, +1), -c);
        lin.add(g.neighbour(xm, 1, -1), c);
    }
    return lin;
}

}  // namespace hjfb
