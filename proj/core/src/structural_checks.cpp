#include "hjfb/structural_checks.hpp"

#include <algorithm>
#include <cmath>

#include "hjfb/errors.hpp"

namespace hjfb {

namespace {

void require_samples(int n) {
    if (n < 1) throw InvalidArgument("n_samples must be >= 1");
}

void append_entries(std::vector<double>& out, const SymMat& m) {
    for (int i = 0; i < m.dim(); ++i) {
        for (int j = 0; j < m.dim(); ++j) out.push_back(m(i, j));
    }
}

std::vector<double> pair_witness(const SymMat& a, const SymMat& b) {
    std::vector<double> w;
    append_entries(w, a);
    append_entries(w, b);
    return w;
}

CheckReport make_report(std::string name, const WorstCase& wc, double tol, int n,
                        std::uint64_t seed, std::string note) {
    CheckReport r;
    r.name = std::move(name);
    r.worst_margin = wc.worst();
    r.tolerance = tol;
    r.passed = wc.worst() <= tol;
    r.witness = wc.witness();
    r.note = std::move(note);
    r.n_samples = n;
    r.seed = seed;
    return r;
}

double a1_margin(const EllipticOperator& op, const SymMat& m, const SymMat& n) {
    return op.evaluate(m) - op.evaluate(n) - op.c_f() * spectral_norm(positive_part(n - m));
}

}  // namespace

SymMat random_symmetric(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> full(static_cast<std::size_t>(dim * dim));
    for (double& v : full) v = u(rng);
    return SymMat::from_full(dim, full);
}

SymMat random_psd(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymMat p(dim);
    for (int k = 0; k < dim; ++k) {
        Vec col(dim);
        for (int i = 0; i < dim; ++i) col[i] = u(rng);
        p += SymMat::outer(col);
    }
    return p;
}

CheckReport check_a1(const EllipticOperator& op, int n_samples, std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    WorstCase wc;
    for (int k = 0; k < n_samples; ++k) {
        const SymMat m = random_symmetric(op.dim(), rng);
        const SymMat n = random_symmetric(op.dim(), rng);
        wc.offer(a1_margin(op, m, n), [&] { return pair_witness(m, n); });
    }
    return make_report("a1", wc, kOperatorCheckTolerance, n_samples, seed,
                       "witness = (M, N) row-major; margin = F(M)-F(N)-C_F|(N-M)_+|");
}

CheckReport check_homogeneity(const EllipticOperator& op, int n_samples, std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.0, 10.0);
    WorstCase wc;
    auto probe = [&](const SymMat& m, double s) {
        const double expected = s * op.evaluate(m);
        const double margin = std::abs(op.evaluate(s * m) - expected) / (1.0 + std::abs(expected));
        wc.offer(margin, [&] {
            std::vector<double> w;
            append_entries(w, m);
            w.push_back(s);
            return w;
        });
    };
    for (int k = 0; k < n_samples; ++k) {
        const SymMat m = random_symmetric(op.dim(), rng);
        // The first sample always exercises s = 0, i.e. F(0) = 0.
        probe(m, k == 0 ? 0.0 : scale(rng));
    }
    return make_report("homogeneity", wc, kOperatorCheckTolerance, n_samples, seed,
                       "witness = (M row-major, s); margin = |F(sM)-sF(M)|/(1+|sF(M)|)");
}

CheckReport check_lemma_equivalence(const EllipticOperator& op, int n_samples,
                                    std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    WorstCase a1;
    WorstCase lip;
    WorstCase mono;
    const int d = op.dim();

    auto visit_pair = [&](const SymMat& m, const SymMat& n) {
        a1.offer(a1_margin(op, m, n), [&] { return pair_witness(m, n); });
        const double lip_margin =
            std::abs(op.evaluate(m) - op.evaluate(n)) - op.c_f() * spectral_norm(n - m);
        lip.offer(lip_margin, [&] { return pair_witness(m, n); });
    };

    for (int k = 0; k < n_samples; ++k) {
        const SymMat m = random_symmetric(d, rng);
        const SymMat n = random_symmetric(d, rng);
        const SymMat below = m - random_psd(d, rng);  // m >= below
        visit_pair(m, n);
        visit_pair(n, m);
        visit_pair(m, below);
        visit_pair(below, m);
        mono.offer(op.evaluate(m) - op.evaluate(below), [&] { return pair_witness(m, below); });
    }

    const double tol = kOperatorCheckTolerance;
    CheckReport a1_report = make_report("a1", a1, tol, n_samples, seed,
                                        "witness = (M, N); margin = F(M)-F(N)-C_F|(N-M)_+|");
    CheckReport lip_report = make_report("lipschitz", lip, tol, n_samples, seed,
                                         "witness = (M, N); margin = |F(M)-F(N)|-C_F|N-M|");
    CheckReport mono_report = make_report("monotone", mono, tol, n_samples, seed,
                                          "witness = (M, N) with M >= N; margin = F(M)-F(N)");

    const bool consistent = a1_report.passed == (lip_report.passed && mono_report.passed);
    CheckReport r;
    r.name = "lemma_equivalence";
    r.passed = consistent;
    r.worst_margin = consistent ? 0.0 : 1.0;
    r.tolerance = 0.0;
    r.n_samples = n_samples;
    r.seed = seed;
    r.note = "passes iff A1 agrees with (Lipschitz and monotone) on the shared sample set";
    r.parts = {std::move(a1_report), std::move(lip_report), std::move(mono_report)};
    return r;
}

}  // namespace hjfb
