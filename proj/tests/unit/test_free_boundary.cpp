#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <hjfb/errors.hpp>
#include <hjfb/free_boundary.hpp>

using namespace hjfb;

namespace {

const Box kLine(Vec{-1.0}, Vec{1.0});

/// a = 1/4, V = 2 keeps H(0) between the two levels so both phases appear.
TwoPhaseProblem reference(int n, double lp = 2.0, double lm = 1.0, std::vector<double> eps = default_eps_schedule(),
                          double g = 0.2) {
    const Grid grid(kLine, n);
    return TwoPhaseProblem(grid, EllipticOperator::negative_trace(1), Hamiltonian::power(kLine, 0.25, 2.0, 3.0), lp, lm,
                           GridFunction(grid, g), std::move(eps));
}

}  // namespace

TEST(Schedule, DefaultIsHalvingDownToOneThousandth) {
    const auto s = default_eps_schedule();
    ASSERT_GE(s.size(), 2U);
    EXPECT_DOUBLE_EQ(s.front(), 0.2);
    EXPECT_DOUBLE_EQ(s[1], 0.1);
    EXPECT_DOUBLE_EQ(s.back(), 1e-3);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i], s[i - 1]);
}

TEST(Clamp, Examples) {
    const Grid g(kLine, 4);  // nodes -1, -0.5, 0, 0.5, 1
    const GridFunction v(g, std::vector<double>{-1.0, -0.05, 0.0, 0.05, 1.0});
    const GridFunction c = clamp_indicator(v, 0.1);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_DOUBLE_EQ(c[1], 0.25);
    EXPECT_DOUBLE_EQ(c[2], 0.5);
    EXPECT_DOUBLE_EQ(c[3], 0.75);
    EXPECT_EQ(c[4], 1.0);
    EXPECT_THROW(clamp_indicator(v, 0.25), InvalidArgument);
    EXPECT_THROW(clamp_indicator(v, 0.0), InvalidArgument);
}

TEST(Mollify, ConstantsArePreservedAndOutputStaysInUnitInterval) {
    const Grid g(kLine, 64);
    const GridFunction c(g, 0.7);
    const GridFunction m = mollify(c, 0.2);
    for (double x : m.values()) EXPECT_NEAR(x, 0.7, 1e-14);
    const GridFunction step = GridFunction::sample(g, [](const Vec& x) { return x[0] > 0 ? 1.0 : 0.0; });
    const GridFunction smooth = mollify(step, 0.2);
    for (double x : smooth.values()) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
    }
}

TEST(Mollify, SymmetricStepIsHalvedAtTheJump) {
    const Grid g(kLine, 64);  // h = 1/32, node 32 at x = 0
    GridFunction step(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const double x = g.coordinates(k)[0];
        step[k] = x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5);
    }
    const GridFunction m = mollify(step, 4.0 / 32.0);
    EXPECT_NEAR(m[32], 0.5, 1e-14);
    EXPECT_LT(m[30], 0.5);
    EXPECT_GT(m[34], 0.5);
    EXPECT_EQ(m[0], 0.0);
    EXPECT_EQ(m[64], 1.0);
}

TEST(Mollify, UnresolvedRadiusIsIdentity) {
    const Grid g(kLine, 16);  // h = 1/8
    EXPECT_FALSE(mollifier_resolved(g, 0.1));
    EXPECT_TRUE(mollifier_resolved(g, 0.2));
    const GridFunction v = GridFunction::sample(g, [](const Vec& x) { return x[0] > 0 ? 1.0 : 0.0; });
    EXPECT_EQ(mollify(v, 0.1), v);
}

TEST(Rhs, Examples) {
    const Grid g(kLine, 4);
    const GridFunction h(g, std::vector<double>{0.0, 0.25, 0.5, 1.0, 1.0});
    const GridFunction r = two_phase_rhs(h, 3.0, 1.0);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_DOUBLE_EQ(r[1], 1.5);
    EXPECT_DOUBLE_EQ(r[2], 2.0);
    EXPECT_DOUBLE_EQ(r[3], 3.0);
}

TEST(TwoPhase, ConstructionValidation) {
    const Grid grid(kLine, 16);
    const auto h = Hamiltonian::power(kLine, 0.25, 2.0, 3.0);
    const GridFunction bc(grid, 0.2);
    const auto tr = EllipticOperator::negative_trace(1);
    EXPECT_THROW(TwoPhaseProblem(grid, tr, h, 1.0, 2.0, bc), InvalidArgument);
    EXPECT_THROW(TwoPhaseProblem(grid, tr, h, 1.0, 0.0, bc), InvalidArgument);
    EXPECT_THROW(TwoPhaseProblem(grid, tr, h, 2.0, 1.0, bc, {0.1, 0.2}), InvalidArgument);
    EXPECT_THROW(TwoPhaseProblem(grid, tr, h, 2.0, 1.0, bc, {0.3}), InvalidArgument);
    EXPECT_THROW(TwoPhaseProblem(grid, EllipticOperator::pucci_plus(1, 1.0, 2.0), h, 2.0, 1.0, bc), InvalidArgument);
    EXPECT_NO_THROW(TwoPhaseProblem(grid, tr, h, 1.5, 1.5, bc));
}

TEST(TwoPhase, BoundaryWarnings) {
    EXPECT_TRUE(reference(16).warnings().empty());
    EXPECT_DOUBLE_EQ(reference(16).boundary_min(), 0.2);
    EXPECT_DOUBLE_EQ(reference(16).boundary_nondegeneracy(), 1.0);
    const auto bad = reference(16, 2.0, 1.0, default_eps_schedule(), 2.5);
    EXPECT_FALSE(bad.warnings().empty());
}

TEST(FixedPoint, EqualLevelsConvergeInOneOuterIteration) {
    const auto p = reference(64, 1.5, 1.5);
    for (double eps : {0.2, 0.05, 1e-3}) {
        const auto out = fixed_point_solve(p, eps, boundary_interpolant(p.boundary()));
        EXPECT_TRUE(out.converged) << eps;
        EXPECT_EQ(out.outer_iters, 1) << eps;
    }
}

TEST(FixedPoint, StartingGuessesAgree) {
    const auto p = reference(64);
    const double eps = 0.1;
    const auto a = fixed_point_solve(p, eps, boundary_interpolant(p.boundary()));
    const auto b = fixed_point_solve(p, eps, GridFunction(p.grid(), 0.0));
    GridFunction c0 = boundary_interpolant(p.boundary());
    for (std::size_t k = 1; k + 1 < c0.size(); ++k) c0[k] = -0.5;
    const auto c = fixed_point_solve(p, eps, c0);
    ASSERT_TRUE(a.converged && b.converged && c.converged);
    const double tol = 10 * p.fixed_point().tol_fp;
    EXPECT_LE(a.u.distance(b.u), tol);
    EXPECT_LE(a.u.distance(c.u), tol);
}

TEST(Continuation, SingleEntrySchedule) {
    const auto p = reference(64, 2.0, 1.0, {0.05});
    const auto r = epsilon_continuation(p);
    ASSERT_EQ(r.trace.size(), 1U);
    EXPECT_TRUE(r.all_converged);
    EXPECT_FALSE(r.trace[0].delta_to_previous.has_value());
    EXPECT_EQ(r.u_star, r.trace[0].outcome.u);
}

TEST(Continuation, ReferenceRunHasBothPhasesAndPassesBandCheck) {
    const auto p = reference(128);
    const auto r = epsilon_continuation(p);
    ASSERT_TRUE(r.all_converged);
    EXPECT_FALSE(r.failed_eps.has_value());
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_TRUE(r.trace[i].delta_to_previous.has_value());
    const double delta = default_zero_band(p.inner().tol);
    const auto ph = extract_phases(r.u_star, delta);
    bool pos = false;
    bool neg = false;
    for (std::size_t k = 0; k < r.u_star.size(); ++k) {
        pos = pos || ph.positive_mask[k];
        neg = neg || ph.negative_mask[k];
    }
    EXPECT_TRUE(pos);
    EXPECT_TRUE(neg);
    EXPECT_FALSE(ph.free_boundary_cells.empty());
    EXPECT_TRUE(residual_band_check(p, r.u_star, delta).passed);
}

TEST(Continuation, WarmStartNeedsNoMoreOuterIterations) {
    // Both runs start on the two-phase branch; from u = 0.2 a cold start at small
    // eps reproduces the positive single-phase solution instead.
    const auto p = reference(64);
    GridFunction v0(p.grid(), -0.4);
    v0[0] = v0[v0.size() - 1] = 0.2;
    const auto warm = epsilon_continuation(p, v0, true);
    const auto cold = epsilon_continuation(p, v0, false);
    ASSERT_TRUE(warm.all_converged && cold.all_converged);
    const auto& wv = warm.u_star.values();
    const auto& cv = cold.u_star.values();
    EXPECT_LT(*std::min_element(wv.begin(), wv.end()), 0.0);
    EXPECT_LT(*std::min_element(cv.begin(), cv.end()), 0.0);
    int w = 0;
    int c = 0;
    for (const auto& s : warm.trace) w += s.outcome.outer_iters;
    for (const auto& s : cold.trace) c += s.outcome.outer_iters;
    EXPECT_LE(w, c);
}

TEST(BandCheck, CorruptedSolutionFails) {
    const auto p = reference(64, 2.0, 1.0, {0.05});
    GridFunction u = epsilon_continuation(p).u_star;
    u[32] += 0.5;
    const auto rep = residual_band_check(p, u, 1e-4, 0.05);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.witness.size(), 3U);
    EXPECT_GE(rep.worst_margin, 0.05);
}

TEST(Phases, SignsAndCells) {
    const Grid g(kLine, 4);
    const GridFunction u(g, std::vector<double>{0.2, 0.1, 0.0, -0.1, -0.2});
    const auto ph = extract_phases(u, 0.05);
    EXPECT_EQ(ph.phase(0), '+');
    EXPECT_EQ(ph.phase(2), '0');
    EXPECT_EQ(ph.phase(4), '-');
    EXPECT_EQ(ph.free_boundary_cells, (std::vector<std::size_t>{1, 2}));
    std::stringstream ss;
    write_phase_csv(ss, u, ph);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "x,phase");
    EXPECT_NE(ss.str().find("0,0"), std::string::npos);
    EXPECT_DOUBLE_EQ(default_zero_band(1e-8), 1e-4);
    EXPECT_DOUBLE_EQ(default_zero_band(1e-3), 1e-2);
}
