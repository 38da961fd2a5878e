#pragma once

#include <cstdint>
#include <random>

#include "hjfb/check_report.hpp"
#include "hjfb/elliptic_operator.hpp"

namespace hjfb {

/// Samplers for the operator assumptions. All matrix norms are spectral.
/// Sample matrices have i.i.d. uniform [-1,1] entries, then are symmetrized.

inline constexpr double kOperatorCheckTolerance = 1e-10;

/// Uniform [-1,1] entries, symmetrized.
SymMat random_symmetric(int dim, std::mt19937_64& rng);
/// B B^T with B uniform [-1,1]; positive semi-definite.
SymMat random_psd(int dim, std::mt19937_64& rng);

/// max over pairs of F(M) - F(N) - C_F |(N - M)_+|.
/// Witness layout: M entries (row-major d*d) followed by N entries.
CheckReport check_a1(const EllipticOperator& op, int n_samples, std::uint64_t seed);

/// |F(sM) - s F(M)| <= tol (1 + |s F(M)|), s uniform in [0,10]; s = 0 is always tested.
CheckReport check_homogeneity(const EllipticOperator& op, int n_samples, std::uint64_t seed);

/// On one sample set, evaluates A1, the Lipschitz bound |F(M)-F(N)| <= C_F |N-M|
/// and monotonicity F(M) <= F(N) for M >= N. Passes iff
/// A1-pass == (Lipschitz-pass && monotone-pass). The three sub-reports are in `parts`.
CheckReport check_lemma_equivalence(const EllipticOperator& op, int n_samples,
                                    std::uint64_t seed);

}  // namespace hjfb
