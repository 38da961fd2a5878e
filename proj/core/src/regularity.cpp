#include "hjfb/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include "hjfb/errors.hpp"
#include "hjfb/hamiltonian.hpp"
#include "hjfb/parallel.hpp"

namespace hjfb {

void StructuralConstants::validate() const {
    if (!(m > 1.0)) throw InvalidArgument("structural constant m must exceed 1");
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c_f > 0.0 && c_dim > 0.0)) {
        throw InvalidArgument("structural constants c1, c2, c3, c_f, c_dim must be positive");
    }
    if (!(f_norm >= 0.0) || !std::isfinite(f_norm)) throw InvalidArgument("f_norm must be finite and >= 0");
}

StructuralConstants StructuralConstants::from(const EllipticOperator& op, const Hamiltonian& h,
                                              double f_norm, std::optional<double> c_dim) {
    StructuralConstants sc;
    sc.m = h.m();
    sc.c1 = h.c1();
    sc.c2 = h.c2();
    sc.c3 = h.c3();
    sc.c_f = op.c_f();
    sc.c_dim = c_dim.value_or(10.0 * op.dim());
    sc.f_norm = f_norm;
    sc.validate();
    return sc;
}

StructuralConstants absorb_source(const StructuralConstants& sc) {
    StructuralConstants out = sc;
    out.c1 += sc.f_norm;
    out.c3 += sc.f_norm;
    return out;
}

double theoretical_K(const StructuralConstants& sc) {
    sc.validate();
    const double m = sc.m;
    const double g = gamma_exponent(m);
    const double denom = sc.c2 * std::pow(g, m);
    const double first = std::pow(4.0, m / (m - 1.0)) * std::pow(sc.c_f * sc.c_dim / denom, 1.0 / (m - 1.0));
    const double second = 4.0 * std::pow((sc.f_norm + sc.c1) / denom, 1.0 / m);
    return std::pow(2.0, 1.0 / (m - 1.0)) * (first + second);
}

LBranches theoretical_L_branches(const StructuralConstants& sc) {
    sc.validate();
    const double m = sc.m;
    LBranches b;
    if (m > 2.0) {
        const double denom = sc.c2 * std::pow(gamma_exponent(m), m);
        b.branch1 = std::pow(2.0, 1.0 / (m - 1.0)) *
                    (std::pow(sc.c_f * sc.c_dim / denom, 1.0 / (m - 1.0)) + std::pow(sc.c1 / denom, 1.0 / m));
    }
    b.branch2 = 2.0 * std::pow(std::pow(3.0, m) * sc.c_f * sc.c_dim * sc.c3 / sc.c2, 1.0 / (m - 1.0));
    b.branch3 = std::pow(sc.c1 / sc.c3, 1.0 / m);
    b.value = std::max({b.branch1.value_or(0.0), b.branch2, b.branch3});
    return b;
}

double theoretical_L(const StructuralConstants& sc) { return theoretical_L_branches(sc).value; }

namespace {

/// Index range [lo, hi] per axis of the nodes at least `margin` inside the box.
struct IndexBox {
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 0};
};

IndexBox subdomain_box(const Grid& g, double margin) {
    if (!(margin > 0.0)) throw InvalidArgument("subdomain margin must be positive");
    IndexBox b;
    for (int a = 0; a < g.dim(); ++a) {
        const double h = g.spacing(a);
        const double slack = 1e-9 * h;
        const auto ua = static_cast<std::size_t>(a);
        b.lo[ua] = static_cast<int>(std::ceil((margin - slack) / h));
        b.hi[ua] = g.cells(a) - b.lo[ua];
        if (b.lo[ua] > b.hi[ua]) throw InvalidArgument("subdomain is empty for this margin");
    }
    return b;
}

double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace

std::vector<std::size_t> subdomain_nodes(const Grid& grid, double margin) {
    const IndexBox b = subdomain_box(grid, margin);
    std::vector<std::size_t> nodes;
    const int jlo = grid.dim() == 2 ? b.lo[1] : 0;
    const int jhi = grid.dim() == 2 ? b.hi[1] : 0;
    for (int i = b.lo[0]; i <= b.hi[0]; ++i) {
        for (int j = jlo; j <= jhi; ++j) nodes.push_back(grid.flat(i, j));
    }
    return nodes;
}

double holder_seminorm(const GridFunction& u, double margin, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
    std::vector<std::size_t> nodes = subdomain_nodes(u.grid(), margin);
    if (nodes.size() > kSeminormNodeCap) {
        std::mt19937_64 rng(kSeminormSeed);
        std::shuffle(nodes.begin(), nodes.end(), rng);
        nodes.resize(kSeminormNodeCap);
        std::sort(nodes.begin(), nodes.end());
    }
    const Grid& g = u.grid();
    std::vector<Vec> coords;
    coords.reserve(nodes.size());
    for (std::size_t k : nodes) coords.push_back(g.coordinates(k));

    std::mutex mu;
    double best = 0.0;
    parallel_for(
        nodes.size(),
        [&](std::size_t begin, std::size_t end) {
            double local = 0.0;
            for (std::size_t a = begin; a < end; ++a) {
                for (std::size_t b = a + 1; b < nodes.size(); ++b) {
                    const double q = std::abs(u[nodes[a]] - u[nodes[b]]) /
                                     std::pow(distance(coords[a], coords[b]), gamma);
                    local = std::max(local, q);
                }
            }
            const std::lock_guard lock(mu);
            best = std::max(best, local);
        },
        64);
    return best;
}

ModulusReport estimate_exponent(const GridFunction& u, double margin) {
    const Grid& g = u.grid();
    const IndexBox b = subdomain_box(g, margin);
    const int d = g.dim();
    const double h = g.min_spacing();
    double width = 1e300;
    for (int a = 0; a < d; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        width = std::min(width, (b.hi[ua] - b.lo[ua]) * g.spacing(a));
    }
    std::vector<double> radii;
    for (double r = h; r <= 0.25 * width * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
    if (radii.size() < 4) throw InvalidArgument("fewer than four dyadic scales fit in the subdomain");

    ModulusReport rep;
    rep.margin = margin;
    const double hx = g.spacing(0);
    const double hy = d == 2 ? g.spacing(1) : 1.0;
    for (double r : radii) {
        const double lo = r * (1.0 - 1e-9);
        const double hi = r * (1.0 + h) * (1.0 + 1e-9);
        // Offsets (di, dj) with |(di hx, dj hy)| in the annulus, one per unordered pair.
        std::vector<std::array<int, 2>> offsets;
        const int mx = static_cast<int>(std::floor(hi / hx));
        const int my = d == 2 ? static_cast<int>(std::floor(hi / hy)) : 0;
        for (int di = 0; di <= mx; ++di) {
            for (int dj = -my; dj <= my; ++dj) {
                if (di == 0 && dj <= 0) continue;
                const double len = std::hypot(di * hx, dj * hy);
                if (len >= lo && len <= hi) offsets.push_back({di, dj});
            }
        }
        double omega = 0.0;
        for (const auto& off : offsets) {
            const int jlo = d == 2 ? b.lo[1] : 0;
            const int jhi = d == 2 ? b.hi[1] : 0;
            for (int i = b.lo[0]; i + off[0] <= b.hi[0]; ++i) {
                for (int j = jlo; j <= jhi; ++j) {
                    const int j2 = j + off[1];
                    if (j2 < jlo || j2 > jhi) continue;
                    omega = std::max(omega, std::abs(u[g.flat(i, j)] - u[g.flat(i + off[0], j2)]));
                    ++rep.pair_count;
                }
            }
        }
        rep.scales.emplace_back(r, omega);
        rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, omega / r);
    }

    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& [r, omega] : rep.scales) {
        if (omega > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(omega));
        }
    }
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        rep.gamma_hat = std::clamp(sxy / sxx, 0.0, 1.05);
        rep.seminorm_gamma = std::clamp(*rep.gamma_hat, 0.01, 1.0);
    }
    rep.seminorm = holder_seminorm(u, margin, rep.seminorm_gamma);
    return rep;
}

BarrierSample barrier_phi(const Vec& center, double K, double gamma, const Vec& y) {
    if (center.dim() != y.dim()) throw DimensionMismatch("barrier centre and point differ in dimension");
    const Vec z = y - center;
    const double r = z.norm();
    if (!(r > 0.0)) throw InvalidArgument("barrier is singular at its centre");
    if (!(r < 0.5)) throw OutOfDomain("barrier is only defined for |y - c| < 1/2");
    const double q = 0.25 - r * r;
    const double rg = std::pow(r, gamma);

    BarrierSample s;
    s.value = K * rg / q;
    // phi'(r) / r
    const double radial = K * (0.25 * gamma * rg / (r * r) + (2.0 - gamma) * rg) / (q * q);
    s.gradient = radial * z;
    const double second = K * (gamma * (gamma - 1.0) * rg / (r * r * q) +
                               (4.0 * gamma + 2.0) * rg / (q * q) + 8.0 * rg * r * r / (q * q * q));
    s.hessian = radial * SymMat::identity(z.dim()) + ((second - radial) / (r * r)) * SymMat::outer(z);
    return s;
}

CheckReport barrier_supersolution_check(const EllipticOperator& op, const Hamiltonian& h,
                                        const StructuralConstants& sc, int n_samples,
                                        std::uint64_t seed, std::optional<double> K) {
    if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
    if (op.dim() != h.dim()) throw DimensionMismatch("operator and Hamiltonian differ in dimension");
    sc.validate();
    const double k = K.value_or(theoretical_K(sc));
    const double m = sc.m;
    const double g = gamma_exponent(m);

    CheckReport scalar;
    scalar.name = "barrier_scalar";
    const double lhs = -sc.c_f * sc.c_dim * k + sc.c2 * std::pow(g, m) / std::pow(4.0, m) * std::pow(k, m);
    const double rhs = sc.f_norm + sc.c1;
    scalar.worst_margin = rhs - lhs;
    scalar.passed = lhs > rhs;
    scalar.witness = {k, lhs, rhs};
    scalar.n_samples = 1;
    scalar.note = "witness = (K, -C_F C(d) K + C2 gamma^m K^m / 4^m, f_norm + C1); strict inequality";

    const int d = op.dim();
    Vec center(d);
    for (int a = 0; a < d; ++a) center[a] = 0.5 * (h.domain().lower[a] + h.domain().upper[a]);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> radius(0.01, 0.49);
    WorstCase wc;
    for (int s = 0; s < n_samples; ++s) {
        Vec dir(d);
        double len = 0.0;
        while (!(len > 1e-12)) {
            for (int a = 0; a < d; ++a) dir[a] = normal(rng);
            len = dir.norm();
        }
        const Vec y = center + (radius(rng) / len) * dir;
        const BarrierSample b = barrier_phi(center, k, g, y);
        const double value = op.evaluate(b.hessian, y) + h.evaluate(b.gradient, y);
        wc.offer(sc.f_norm - value, [&] {
            std::vector<double> w;
            for (int a = 0; a < d; ++a) w.push_back(y[a]);
            w.push_back(value);
            return w;
        });
    }
    CheckReport pointwise;
    pointwise.name = "barrier_pointwise";
    pointwise.worst_margin = wc.worst();
    pointwise.passed = wc.worst() < 0.0;
    pointwise.witness = wc.witness();
    pointwise.n_samples = n_samples;
    pointwise.seed = seed;
    pointwise.note = "witness = (y, F(D^2 phi) + H(D phi, y)); margin = f_norm - value; strict inequality";

    CheckReport r;
    r.name = "barrier_supersolution";
    r.passed = scalar.passed && pointwise.passed;
    r.worst_margin = std::max(scalar.worst_margin, pointwise.worst_margin);
    r.witness = scalar.passed ? pointwise.witness : scalar.witness;
    r.n_samples = n_samples;
    r.seed = seed;
    r.note = scalar.passed ? pointwise.note : scalar.note;
    r.parts = {scalar, pointwise};
    return r;
}

}  // namespace hjfb
