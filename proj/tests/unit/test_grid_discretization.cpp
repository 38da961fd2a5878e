#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <hjfb/discretization.hpp>
#include <hjfb/errors.hpp>

using namespace hjfb;

namespace {

const Box kLine(Vec{-1.0}, Vec{1.0});
const Box kSquare(Vec{-1.0, -1.0}, Vec{1.0, 1.0});
constexpr double kPi = std::numbers::pi;

GridFunction sample(const Grid& g, const ScalarField& f) { return GridFunction::sample(g, f); }

DiscreteProblem simple_problem(const Grid& g, const Hamiltonian& h, const ScalarField& f,
                               const ScalarField& bc, double zero_order = 0.0) {
    return DiscreteProblem(g, EllipticOperator::negative_trace(g.dim()), h, sample(g, f), sample(g, bc),
                           zero_order);
}

}  // namespace

TEST(Grid, IndexingAndCoordinates) {
    const Grid g(kSquare, {4, 8});
    EXPECT_EQ(g.node_count(), 5u * 9u);
    EXPECT_DOUBLE_EQ(g.spacing(0), 0.5);
    EXPECT_DOUBLE_EQ(g.spacing(1), 0.25);
    const std::size_t k = g.flat(2, 3);
    EXPECT_EQ(k, 2u * 9u + 3u);
    EXPECT_EQ(g.multi(k), (std::array<int, 2>{2, 3}));
    const Vec x = g.coordinates(k);
    EXPECT_DOUBLE_EQ(x[0], 0.0);
    EXPECT_DOUBLE_EQ(x[1], -0.25);
    EXPECT_FALSE(g.is_boundary(k));
    EXPECT_TRUE(g.is_boundary(g.flat(0, 3)));
    EXPECT_TRUE(g.is_boundary(g.flat(2, 8)));
    EXPECT_EQ(g.neighbour(k, 0, +1), g.flat(3, 3));
    EXPECT_EQ(g.neighbour(k, 1, -1), g.flat(2, 2));
    EXPECT_EQ(g.cell_count(), 32u);
    EXPECT_EQ(g.cell_corners(0).size(), 4u);
}

TEST(Grid, RejectsTooFewCells) {
    EXPECT_THROW(Grid(kLine, 3), InvalidArgument);
    EXPECT_THROW(GridFunction(Grid(kLine, 8), std::vector<double>(3)), DimensionMismatch);
    EXPECT_THROW(GridFunction(Grid(kLine, 8)).distance(GridFunction(Grid(kLine, 16))), DimensionMismatch);
}

TEST(Grid, CsvRoundTripIsExact) {
    const Grid g(kSquare, {5, 7});
    const GridFunction u = sample(g, [](const Vec& x) { return std::sin(1e3 * x[0]) / 3.0 + x[1] * 1e-17; });
    std::stringstream ss;
    write_csv(ss, u);
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "x,y,value");
    std::stringstream in1(text);
    EXPECT_EQ(read_csv(in1, g), u);
    std::stringstream in2(text);
    const GridFunction inferred = read_csv(in2);
    EXPECT_EQ(inferred.grid(), g);
    EXPECT_EQ(inferred.values(), u.values());
    std::stringstream in3(text);
    EXPECT_THROW(read_csv(in3, Grid(kSquare, {5, 8})), InvalidArgument);
    std::stringstream bad("x,value\n0,abc\n");
    EXPECT_THROW(read_csv(bad), InvalidArgument);
}

TEST(OneSided, Examples) {
    const Grid g(kLine, 4);  // h = 0.5
    const GridFunction c(g, 3.0);
    EXPECT_EQ(gradient_one_sided(c, 2, 0).minus, 0.0);
    EXPECT_EQ(gradient_one_sided(c, 2, 0).plus, 0.0);
    const auto lin = gradient_one_sided(sample(g, [](const Vec& x) { return x[0]; }), 1, 0);
    EXPECT_DOUBLE_EQ(lin.minus, 1.0);
    EXPECT_DOUBLE_EQ(lin.plus, 1.0);
    const auto kink = gradient_one_sided(sample(g, [](const Vec& x) { return std::abs(x[0]); }), 2, 0);
    EXPECT_DOUBLE_EQ(kink.minus, -1.0);
    EXPECT_DOUBLE_EQ(kink.plus, 1.0);
    EXPECT_THROW(gradient_one_sided(c, 0, 0), InvalidArgument);
}

TEST(Hessian, QuadraticExactness) {
    for (int n : {4, 10, 37}) {
        const Grid g(kLine, n);
        const GridFunction u = sample(g, [](const Vec& x) { return x[0] * x[0]; });
        for (std::size_t k = 1; k + 1 < g.node_count(); ++k) EXPECT_NEAR(hessian_central(u, k)(0, 0), 2.0, 1e-10);
    }
    const Grid g2(kSquare, {6, 8});
    const GridFunction xy = sample(g2, [](const Vec& x) { return x[0] * x[1]; });
    const GridFunction q = sample(g2, [](const Vec& x) { return 3 + x[0] - 2 * x[1] + 0.5 * x[0] * x[0] - x[1] * x[1] + 0.25 * x[0] * x[1]; });
    for (std::size_t k = 0; k < g2.node_count(); ++k) {
        if (g2.is_boundary(k)) continue;
        const SymMat h = hessian_central(xy, k);
        EXPECT_NEAR(h(0, 1), 1.0, 1e-12);
        EXPECT_NEAR(h(0, 0), 0.0, 1e-12);
        const SymMat hq = hessian_central(q, k);
        EXPECT_NEAR(hq(0, 0), 1.0, 1e-11);
        EXPECT_NEAR(hq(1, 1), -2.0, 1e-11);
        EXPECT_NEAR(hq(0, 1), 0.25, 1e-11);
    }
}

TEST(Hessian, CubicAtOne) {
    const Grid g(Box(Vec{0.0}, Vec{2.0}), 20);  // h = 0.1, node 10 at x = 1
    const GridFunction u = sample(g, [](const Vec& x) { return x[0] * x[0] * x[0]; });
    EXPECT_NEAR(hessian_central(u, 10)(0, 0), 6.0, 1e-11);
}

TEST(LaxFriedrichs, ConsistencyAndExamples) {
    const auto h = Hamiltonian::power(kSquare, 1.2, 0.3, 3.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int k = 0; k < 100; ++k) {
        const Vec p{n(rng), n(rng)};
        const Vec x{0.3, -0.1};
        EXPECT_EQ(numerical_hamiltonian_lf(h, p, p, x, 5.0), h_eval(h, p, x));
        EXPECT_EQ(numerical_hamiltonian_lf(h, p, p, x, 10.0), h_eval(h, p, x));
    }
    const auto quad = Hamiltonian::pure_power(kLine, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(numerical_hamiltonian_lf(quad, Vec{-1.0}, Vec{1.0}, Vec{0.0}, 2.0), -2.0);
    EXPECT_THROW(numerical_hamiltonian_lf(quad, Vec{0.0}, Vec{0.0}, Vec{0.0}, 0.0), InvalidArgument);
}

TEST(LaxFriedrichs, MonotoneInOneSidedSlopes) {
    const auto h = Hamiltonian::power(kLine, 1.0, 0.0, 3.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng);
        const double b = u(rng);
        const double sigma = select_viscosity(h, Vec{std::min(a, b) - 0.1}, Vec{std::max(a, b) + 0.1}, Vec{0.0});
        const double base = numerical_hamiltonian_lf(h, Vec{a}, Vec{b}, Vec{0.0}, sigma);
        EXPECT_LE(numerical_hamiltonian_lf(h, Vec{a}, Vec{b + 0.1}, Vec{0.0}, sigma), base + 1e-12);
        EXPECT_LE(numerical_hamiltonian_lf(h, Vec{a - 0.1}, Vec{b}, Vec{0.0}, sigma), base + 1e-12);
    }
}

TEST(DiscreteProblem, Validation) {
    const Grid g(kLine, 16);
    const auto h = Hamiltonian::power(kLine, 1.0, 0.0, 3.0);
    const auto op = EllipticOperator::negative_trace(1);
    const GridFunction z(g);
    EXPECT_THROW(DiscreteProblem(g, EllipticOperator::negative_trace(2), h, z, z, 0.0), DimensionMismatch);
    EXPECT_THROW(DiscreteProblem(g, op, h, GridFunction(Grid(kLine, 8)), z, 0.0), DimensionMismatch);
    EXPECT_THROW(DiscreteProblem(g, op, h, z, z, -1.0), InvalidArgument);
    EXPECT_THROW(DiscreteProblem(Grid(Box(Vec{-2.0}, Vec{1.0}), 16), op, h, GridFunction(Grid(Box(Vec{-2.0}, Vec{1.0}), 16)),
                                 GridFunction(Grid(Box(Vec{-2.0}, Vec{1.0}), 16)), 0.0),
                 OutOfDomain);
    const Grid g2(kSquare, 8);
    const auto h2 = Hamiltonian::power(kSquare, 1.0, 0.0, 3.0);
    EXPECT_THROW(DiscreteProblem(g2, EllipticOperator::pucci_minus(2, 1.0, 2.0), h2, GridFunction(g2), GridFunction(g2), 0.0),
                 InvalidArgument);
    EXPECT_NO_THROW(DiscreteProblem(g2, EllipticOperator::pucci_minus(2, 1.0, 1.0), h2, GridFunction(g2), GridFunction(g2), 0.0));
    EXPECT_NO_THROW(DiscreteProblem(g, EllipticOperator::pucci_minus(1, 1.0, 2.0), h, z, z, 0.0));
}

TEST(DiscreteResidual, Examples) {
    const Grid g(kLine, 16);
    const auto zero_h = Hamiltonian::custom(kLine, [](const Vec&, const Vec&) { return 0.0; }, 2.0, 1.0, 1.0, 1.0, "zero", false);
    const auto p = simple_problem(g, zero_h, [](const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; });
    EXPECT_EQ(discrete_residual(p, GridFunction(g)).sup_norm(), 0.0);
    const GridFunction r = discrete_residual(p, GridFunction(g, 1.0));
    EXPECT_EQ(r[0], 1.0);
    EXPECT_EQ(r[g.node_count() - 1], 1.0);
    EXPECT_EQ(r[5], 0.0);
}

TEST(DiscreteResidual, ManufacturedResidualIsConsistent) {
    // u = cos(pi x), H = (1 + p^2)^(3/2): f = pi^2 cos(pi x) + (1 + pi^2 sin^2(pi x))^(3/2).
    const auto h = Hamiltonian::power(kLine, 1.0, 0.0, 3.0);
    const ScalarField exact = [](const Vec& x) { return std::cos(kPi * x[0]); };
    const ScalarField f = [](const Vec& x) {
        const double s = std::sin(kPi * x[0]);
        return kPi * kPi * std::cos(kPi * x[0]) + std::pow(1 + kPi * kPi * s * s, 1.5);
    };
    double prev = 0.0;
    for (int n : {64, 128, 256, 512}) {
        const Grid g(kLine, n);
        const auto p = simple_problem(g, h, f, exact);
        const double r = discrete_residual(p, sample(g, exact)).sup_norm();
        if (prev > 0.0) EXPECT_GT(std::log2(prev / r), 0.9) << n;
        prev = r;
    }
}

TEST(DiscreteResidual, SchemeIsMonotone) {
    const Grid g(kLine, 32);
    const auto h = Hamiltonian::power(kLine, 1.0, 0.2, 3.0);
    const auto p = simple_problem(g, h, [](const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; });
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        GridFunction u(g);
        GridFunction v(g);
        for (std::size_t k = 0; k < u.size(); ++k) {
            u[k] = u01(rng) - 0.5;
            v[k] = u[k] + u01(rng);
        }
        const std::size_t i = 1 + static_cast<std::size_t>(trial % 31);
        v[i] = u[i];
        // One viscosity valid for every slope at node i (both functions).
        const auto [um, up] = one_sided_gradients(u, i);
        const auto [vm, vp] = one_sided_gradients(v, i);
        const double lo = std::min({um[0], up[0], vm[0], vp[0]});
        const double hi = std::max({um[0], up[0], vm[0], vp[0]});
        const double sigma = select_viscosity(h, Vec{lo}, Vec{hi}, g.coordinates(i));
        EXPECT_GE(residual_at(p, u, i, sigma), residual_at(p, v, i, sigma) - 1e-9);
    }
}

TEST(Linearization, MatchesFiniteDifferencesOfResidual) {
    const Grid g(kSquare, 8);
    const auto h = Hamiltonian::power(kSquare, [](const Vec& x) { return 1.0 + 0.2 * x[0]; }, [](const Vec&) { return 0.1; }, 3.0);
    const auto op = EllipticOperator::weighted_trace(2, [](const Vec& x) { return SymMat::diagonal(Vec{1.0 + 0.5 * x[0] * x[0], 0.5}); }, 3.0, 1.5);
    const GridFunction u = sample(g, [](const Vec& x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
    const DiscreteProblem p(g, op, h, GridFunction(g, 1.0), GridFunction(g), 0.3);
    const std::size_t node = g.flat(3, 4);
    const auto lin = linearize_at(p, u, node);
    EXPECT_NEAR(lin.value, residual_at(p, u, node), 1e-12);
    for (std::size_t e = 0; e < lin.count; ++e) {
        const auto [j, deriv] = lin.entries[e];
        GridFunction up = u;
        GridFunction dn = u;
        const double t = 1e-6;
        up[j] += t;
        dn[j] -= t;
        // Viscosity frozen: the Jacobian is that of the residual at fixed sigma.
        const double fd = (residual_at(p, up, node, lin.viscosity) - residual_at(p, dn, node, lin.viscosity)) / (2 * t);
        EXPECT_NEAR(deriv, fd, 1e-4 * (1 + std::abs(fd))) << "neighbour " << j;
    }
}
