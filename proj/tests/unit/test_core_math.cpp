#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <hjfb/elliptic_operator.hpp>
#include <hjfb/errors.hpp>
#include <hjfb/structural_checks.hpp>
#include <hjfb/symmat.hpp>

using namespace hjfb;

namespace {

double max_abs_diff(const SymMat& a, const SymMat& b) { return (a - b).max_abs_entry(); }

std::vector<EllipticOperator> builtins(int d) {
    std::vector<EllipticOperator> ops;
    ops.push_back(EllipticOperator::negative_trace(d));
    SymMat a1 = 0.5 * SymMat::identity(d);
    SymMat a2 = SymMat::identity(d);
    a2.set(0, 0, 0.25);
    if (d > 1) a2.set(0, 1, 0.1);
    ops.push_back(EllipticOperator::bellman({a1, a2}));
    ops.push_back(EllipticOperator::pucci_minus(d, 1.0, 2.0));
    ops.push_back(EllipticOperator::pucci_plus(d, 1.0, 2.0));
    ops.push_back(EllipticOperator::weighted_trace(a2));
    return ops;
}

}  // namespace

TEST(SymMat, ConstructionAveragesTriangles) {
    const SymMat m{{1.0, 2.0}, {4.0, 5.0}};
    EXPECT_EQ(m(0, 1), 3.0);
    EXPECT_EQ(m(1, 0), 3.0);
    const SymMat f = SymMat::from_full(2, {1.0, 0.0, 2.0, 1.0});
    EXPECT_EQ(f(0, 1), f(1, 0));
    EXPECT_EQ(f(0, 1), 1.0);
}

TEST(SymEigen, ZeroMatrix) {
    const auto e = sym_eigen(SymMat::zero(2));
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].value, 0.0);
    EXPECT_EQ(e[1].value, 0.0);
}

TEST(SymEigen, DiagonalGivesAxisVectors) {
    const auto e = sym_eigen(SymMat::diagonal(Vec{3.0, -1.0}));
    EXPECT_DOUBLE_EQ(e[0].value, 3.0);
    EXPECT_DOUBLE_EQ(e[1].value, -1.0);
    EXPECT_NEAR(std::abs(e[0].vector[0]), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e[1].vector[1]), 1.0, 1e-15);
}

TEST(SymEigen, OffDiagonalSwap) {
    const auto e = sym_eigen(SymMat{{0.0, 1.0}, {1.0, 0.0}});
    EXPECT_NEAR(e[0].value, 1.0, 1e-15);
    EXPECT_NEAR(e[1].value, -1.0, 1e-15);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(e[0].vector[0]), s, 1e-15);
    EXPECT_NEAR(e[0].vector[0] * e[0].vector[1], 0.5, 1e-15);
    EXPECT_NEAR(e[1].vector[0] * e[1].vector[1], -0.5, 1e-15);
}

TEST(SymEigen, ReconstructionAndOrdering) {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 3; ++d) {
        for (int k = 0; k < 500; ++k) {
            const SymMat m = random_symmetric(d, rng);
            const auto e = sym_eigen(m);
            for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GE(e[i - 1].value, e[i].value);
            for (const auto& p : e) EXPECT_NEAR(p.vector.norm(), 1.0, 1e-12);
            const double scale = std::max(1.0, spectral_norm(m));
            EXPECT_LE(max_abs_diff(reconstruct(e, d), m), 1e-12 * scale) << "d=" << d;
        }
    }
}

TEST(SymEigen, RepeatedEigenvalues3D) {
    const SymMat m = SymMat::identity(3) * 2.0;
    const auto e = sym_eigen(m);
    for (const auto& p : e) EXPECT_NEAR(p.value, 2.0, 1e-14);
    EXPECT_LE(max_abs_diff(reconstruct(e, 3), m), 1e-14);
}

TEST(PositivePart, Examples) {
    EXPECT_LE(max_abs_diff(positive_part(SymMat::diagonal(Vec{1.0, -2.0})), SymMat::diagonal(Vec{1.0, 0.0})), 1e-15);
    EXPECT_LE(positive_part(SymMat::diagonal(Vec{-1.0, -3.0})).max_abs_entry(), 0.0);
    EXPECT_LE(max_abs_diff(positive_part(SymMat{{0.0, 2.0}, {2.0, 0.0}}), SymMat{{1.0, 1.0}, {1.0, 1.0}}), 1e-14);
}

TEST(PositivePart, PsdAndSplitting) {
    std::mt19937_64 rng(11);
    for (int d = 1; d <= 3; ++d) {
        for (int k = 0; k < 1000; ++k) {
            const SymMat m = random_symmetric(d, rng);
            const SymMat p = positive_part(m);
            EXPECT_GE(min_eigenvalue(p), -1e-12);
            EXPECT_LE(spectral_norm(m - (p - positive_part(-m))), 1e-12);
        }
    }
}

TEST(SpectralNorm, Examples) {
    EXPECT_DOUBLE_EQ(spectral_norm(SymMat::diagonal(Vec{1.0, -2.0})), 2.0);
    EXPECT_EQ(spectral_norm(SymMat::zero(2)), 0.0);
    EXPECT_NEAR(spectral_norm(SymMat{{0.0, 1.0}, {1.0, 0.0}}), 1.0, 1e-15);
}

TEST(Operator, Examples) {
    EXPECT_DOUBLE_EQ(operator_eval(EllipticOperator::negative_trace(2), SymMat::diagonal(Vec{2.0, 3.0})), -5.0);
    const auto b = EllipticOperator::bellman({0.5 * SymMat::identity(2), 0.25 * SymMat::identity(2)}, 1.0);
    EXPECT_DOUBLE_EQ(operator_eval(b, SymMat::identity(2)), -1.0);
    EXPECT_TRUE(b.satisfies_bellman_bound());
}

TEST(Operator, ZeroAtZeroForBuiltins) {
    for (int d = 1; d <= 3; ++d) {
        for (const auto& op : builtins(d)) EXPECT_EQ(operator_eval(op, SymMat::zero(d)), 0.0) << op.name();
    }
}

TEST(Operator, DimensionMismatchThrows) {
    EXPECT_THROW(operator_eval(EllipticOperator::negative_trace(2), SymMat::identity(3)), DimensionMismatch);
}

TEST(Operator, PucciValues) {
    const auto minus = EllipticOperator::pucci_minus(2, 1.0, 2.0);
    const auto plus = EllipticOperator::pucci_plus(2, 1.0, 2.0);
    const SymMat m = SymMat::diagonal(Vec{3.0, -1.0});
    // -(Lambda e+ - lambda e-) and -(lambda e+ - Lambda e-)
    EXPECT_DOUBLE_EQ(operator_eval(minus, m), -(2.0 * 3.0 - 1.0 * 1.0));
    EXPECT_DOUBLE_EQ(operator_eval(plus, m), -(1.0 * 3.0 - 2.0 * 1.0));
    EXPECT_LE(operator_eval(minus, m), operator_eval(plus, m));
}

TEST(Operator, BellmanBoundViolationIsAcceptedButReported) {
    const auto b = EllipticOperator::bellman({2.0 * SymMat::identity(2)}, 2.0);
    EXPECT_FALSE(b.satisfies_bellman_bound());
    EXPECT_THROW(EllipticOperator::bellman({SymMat::diagonal(Vec{1.0, -1.0})}), InvalidArgument);
}

TEST(Operator, SingleBellmanEqualsWeightedTrace) {
    std::mt19937_64 rng(3);
    const SymMat a = random_psd(2, rng);
    const auto b = EllipticOperator::bellman({a});
    const auto w = EllipticOperator::weighted_trace(a);
    for (int k = 0; k < 200; ++k) {
        const SymMat m = random_symmetric(2, rng);
        EXPECT_EQ(operator_eval(b, m), operator_eval(w, m));
    }
}

TEST(Operator, DegenerateEllipticityOnSamples) {
    std::mt19937_64 rng(5);
    for (int d = 1; d <= 3; ++d) {
        for (const auto& op : builtins(d)) {
            for (int k = 0; k < 1000; ++k) {
                const SymMat n = random_symmetric(d, rng);
                const SymMat m = n + random_psd(d, rng);
                EXPECT_LE(operator_eval(op, m), operator_eval(op, n) + 1e-12) << op.name();
            }
        }
    }
}

TEST(Operator, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(9);
    for (const auto& op : builtins(2)) {
        for (int k = 0; k < 50; ++k) {
            const SymMat m = random_symmetric(2, rng);
            const SymMat dir = random_symmetric(2, rng);
            const double t = 1e-7;
            const double fd = (operator_eval(op, m + t * dir) - operator_eval(op, m - t * dir)) / (2 * t);
            const double analytic = op.gradient(m, Vec(2)).frobenius_dot(dir);
            EXPECT_NEAR(fd, analytic, 1e-5) << op.name();
        }
    }
}

TEST(CheckA1, BuiltinsPass) {
    for (int d = 1; d <= 3; ++d) {
        for (const auto& op : builtins(d)) {
            const auto r = check_a1(op, 2000, 42);
            EXPECT_TRUE(r.passed) << op.name() << " margin " << r.worst_margin;
        }
    }
}

TEST(CheckA1, AdversarialScaledTraceFails) {
    const int d = 2;
    const auto op = EllipticOperator::custom(d, [](const SymMat& m) { return -2.0 * 2 * m.trace(); }, 1.0, "scaled");
    const auto r = check_a1(op, 2000, 42);
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.worst_margin, 0.0);
    EXPECT_EQ(r.witness.size(), 8u);
    // M = -I, N = 0 is an explicit violation: F(M) - F(N) = 2 d^2 > C_F.
    EXPECT_GT(operator_eval(op, -SymMat::identity(d)) - 0.0 - 1.0 * 1.0, 0.0);
}

TEST(CheckA1, BellmanOutsideBoundFails) {
    const auto b = EllipticOperator::bellman({2.0 * SymMat::identity(2)}, 2.0);
    const auto r = check_a1(b, 10000, 42);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.witness.empty());
}

TEST(CheckHomogeneity, Examples) {
    const auto nt = EllipticOperator::negative_trace(2);
    EXPECT_DOUBLE_EQ(operator_eval(nt, 2.0 * SymMat::identity(2)), 2.0 * operator_eval(nt, SymMat::identity(2)));
    for (const auto& op : builtins(2)) EXPECT_TRUE(check_homogeneity(op, 2000, 1).passed) << op.name();
    const auto affine = EllipticOperator::custom(2, [](const SymMat& m) { return -m.trace() + 1.0; }, 2.0, "affine");
    const auto r = check_homogeneity(affine, 100, 1);
    EXPECT_FALSE(r.passed);
    EXPECT_GE(r.worst_margin, 0.5);
}

TEST(EquivalenceCheck, BuiltinsAgreeAndPassAll) {
    for (const auto& op : builtins(2)) {
        const auto r = check_lemma_equivalence(op, 5000, 42);
        EXPECT_TRUE(r.passed) << op.name();
        ASSERT_EQ(r.parts.size(), 3u);
        for (const auto& p : r.parts) EXPECT_TRUE(p.passed) << op.name() << " " << p.name;
    }
}

TEST(EquivalenceCheck, IncreasingOperatorFailsMonotoneAndA1) {
    const auto op = EllipticOperator::custom(2, [](const SymMat& m) { return m.trace(); }, 2.0, "plus_trace");
    const auto r = check_lemma_equivalence(op, 2000, 42);
    ASSERT_EQ(r.parts.size(), 3u);
    EXPECT_FALSE(r.parts[0].passed);
    EXPECT_FALSE(r.parts[2].passed);
    EXPECT_TRUE(r.passed);  // A1 and (Lipschitz and monotone) fail together
}

TEST(Checks, DeterministicGivenSeed) {
    const auto op = EllipticOperator::pucci_minus(2, 1.0, 2.0);
    const auto a = check_a1(op, 500, 17);
    const auto b = check_a1(op, 500, 17);
    EXPECT_EQ(a.worst_margin, b.worst_margin);
    EXPECT_EQ(a.witness, b.witness);
}
