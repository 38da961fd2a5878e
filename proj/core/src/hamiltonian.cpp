#include "hjfb/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "hjfb/errors.hpp"

namespace hjfb {

namespace {

// Lattice used to bound a and V when building the Power family.
int lattice_points_per_axis(int dim) {
    switch (dim) {
        case 1: return 2049;
        case 2: return 129;
        default: return 33;
    }
}

struct FieldSummary {
    double min = 1e300;
    double max = -1e300;
    double lip = 0.0;
};

FieldSummary summarize(const ScalarField& f, const Box& box) {
    const int d = box.dim();
    const int n = lattice_points_per_axis(d);
    std::vector<std::size_t> extent(static_cast<std::size_t>(d), static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);

    std::vector<double> values(total);
    auto point_of = [&](std::size_t flat) {
        Vec x(d);
        for (int k = d - 1; k >= 0; --k) {
            const auto i = static_cast<double>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
            x[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * i / (n - 1);
        }
        return x;
    };
    FieldSummary s;
    for (std::size_t idx = 0; idx < total; ++idx) {
        values[idx] = f(point_of(idx));
        s.min = std::min(s.min, values[idx]);
        s.max = std::max(s.max, values[idx]);
    }
    std::size_t stride = 1;
    for (int k = d - 1; k >= 0; --k) {
        const double h = (box.upper[k] - box.lower[k]) / (n - 1);
        for (std::size_t idx = 0; idx < total; ++idx) {
            const std::size_t i = (idx / stride) % static_cast<std::size_t>(n);
            if (i + 1 >= static_cast<std::size_t>(n)) continue;
            s.lip = std::max(s.lip, std::abs(values[idx + stride] - values[idx]) / h);
        }
        stride *= static_cast<std::size_t>(n);
    }
    return s;
}

void require_exponent(double m) {
    if (!(m > 1.0) || !std::isfinite(m)) throw InvalidArgument("growth exponent m must exceed 1");
}

Vec random_unit(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        Vec v(dim);
        for (int k = 0; k < dim; ++k) v[k] = g(rng);
        const double n = v.norm();
        if (n > 1e-12) return (1.0 / n) * v;
    }
}

// |p| log-uniform in [1e-3, 50] along a uniform direction.
Vec random_gradient(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lg(std::log(1e-3), std::log(50.0));
    return std::exp(lg(rng)) * random_unit(dim, rng);
}

Vec random_point(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec x(box.dim());
    for (int k = 0; k < box.dim(); ++k) x[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * u(rng);
    return x;
}

Vec nearby(const Vec& x, double max_len, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lg(std::log(1e-6), std::log(max_len));
    return x + std::exp(lg(rng)) * random_unit(x.dim(), rng);
}

void append(std::vector<double>& w, const Vec& v) {
    for (int k = 0; k < v.dim(); ++k) w.push_back(v[k]);
}

CheckReport finish(std::string name, const WorstCase& wc, int n, std::uint64_t seed,
                   std::string note) {
    CheckReport r;
    r.name = std::move(name);
    r.worst_margin = wc.worst();
    r.tolerance = kHamiltonianCheckTolerance;
    r.passed = wc.worst() <= kHamiltonianCheckTolerance;
    r.witness = wc.witness();
    r.note = std::move(note);
    r.n_samples = n;
    r.seed = seed;
    return r;
}

void require_samples(int n) {
    if (n < 1) throw InvalidArgument("n_samples must be >= 1");
}

}  // namespace

Hamiltonian Hamiltonian::power(Box domain, ScalarField a, ScalarField v, double m,
                               const PowerOptions& options) {
    require_exponent(m);
    if (!a || !v) throw InvalidArgument("power Hamiltonian needs a and V fields");
    const FieldSummary sa = summarize(a, domain);
    const FieldSummary sv = summarize(v, domain);
    if (!(sa.min > 0.0)) throw InvalidArgument("power Hamiltonian needs inf a > 0");
    if (sv.min < 0.0) throw InvalidArgument("power Hamiltonian needs V >= 0");

    PowerInfo info{};
    info.a_min = sa.min;
    info.upper = std::max(sa.max, sv.max);
    info.lip_a = options.lip_a.value_or(sa.lip);
    info.lip_v = options.lip_v.value_or(sv.lip);

    const double half_pow = std::pow(2.0, 0.5 * m);
    Hamiltonian h;
    h.domain_ = std::move(domain);
    h.m_ = m;
    h.c1_ = options.c1.value_or(info.upper + half_pow * info.lip_a + info.lip_v);
    h.c2_ = options.c2.value_or(info.a_min);
    h.c3_ = options.c3.value_or(half_pow * info.upper + info.upper + half_pow * info.lip_a +
                                info.lip_v);
    h.name_ = "power";
    h.depends_on_x_ = info.lip_a > 0.0 || info.lip_v > 0.0 || sa.min != sa.max || sv.min != sv.max;
    h.power_ = info;
    h.a_ = std::move(a);
    h.v_ = std::move(v);
    h.fn_ = [a = h.a_, v = h.v_, m](const Vec& p, const Vec& x) {
        const double q = p.dot(p);
        return a(x) * std::pow(1.0 + q, 0.5 * m) + v(x);
    };
    return h;
}

Hamiltonian Hamiltonian::power(Box domain, double a, double v, double m,
                               const PowerOptions& options) {
    return power(
        std::move(domain), [a](const Vec&) { return a; }, [v](const Vec&) { return v; }, m,
        options);
}

Hamiltonian Hamiltonian::pure_power(Box domain, double coef, double m) {
    if (!(coef > 0.0)) throw InvalidArgument("pure power coefficient must be positive");
    return custom(
        std::move(domain), [coef, m](const Vec& p, const Vec&) { return coef * std::pow(p.norm(), m); },
        m, coef, coef, coef, "pure_power", false);
}

Hamiltonian Hamiltonian::custom(Box domain, Function fn, double m, double c1, double c2,
                                double c3, std::string name, bool depends_on_x) {
    require_exponent(m);
    if (!fn) throw InvalidArgument("custom Hamiltonian needs a callable");
    Hamiltonian h;
    h.domain_ = std::move(domain);
    h.fn_ = std::move(fn);
    h.m_ = m;
    h.c1_ = c1;
    h.c2_ = c2;
    h.c3_ = c3;
    h.name_ = std::move(name);
    h.depends_on_x_ = depends_on_x;
    return h;
}

Hamiltonian Hamiltonian::with_constants(double c1, double c2, double c3) const {
    Hamiltonian h = *this;
    h.c1_ = c1;
    h.c2_ = c2;
    h.c3_ = c3;
    return h;
}

double Hamiltonian::evaluate(const Vec& p, const Vec& x) const {
    if (p.dim() != dim()) throw DimensionMismatch("gradient dimension does not match H");
    if (!domain_.contains(x)) throw OutOfDomain("H evaluated outside its domain box");
    return fn_(p, x);
}

Vec Hamiltonian::gradient_p(const Vec& p, const Vec& x) const {
    if (power_) {
        const double q = p.dot(p);
        return (a_(x) * m_ * std::pow(1.0 + q, 0.5 * m_ - 1.0)) * p;
    }
    Vec g(dim());
    const double step = 1e-6 * std::max(1.0, p.norm());
    for (int k = 0; k < dim(); ++k) {
        Vec plus = p;
        Vec minus = p;
        plus[k] += step;
        minus[k] -= step;
        g[k] = (evaluate(plus, x) - evaluate(minus, x)) / (2.0 * step);
    }
    return g;
}

double h_eval(const Hamiltonian& h, const Vec& p, const Vec& x) { return h.evaluate(p, x); }

CheckReport verify_growth(const Hamiltonian& h, int n_samples, std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    WorstCase wc;
    for (int k = 0; k < n_samples; ++k) {
        const Vec p = k == 0 ? Vec(h.dim()) : random_gradient(h.dim(), rng);
        const Vec x = random_point(h.domain(), rng);
        const double value = h.evaluate(p, x);
        const double pm = std::pow(p.norm(), h.m());
        const double scale = 1.0 + std::abs(value);
        const double lower_violation = (-h.c1() + h.c2() * pm - value) / scale;
        const double upper_violation = (value - h.c3() * (1.0 + pm)) / scale;
        wc.offer(std::max(lower_violation, upper_violation), [&] {
            std::vector<double> w;
            append(w, p);
            append(w, x);
            return w;
        });
    }
    return finish("growth", wc, n_samples, seed, "witness = (p, x); violation / (1 + |H|)");
}

CheckReport verify_x_continuity(const Hamiltonian& h, int n_samples, std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    WorstCase wc;
    const double diam = h.domain().diameter();
    for (int k = 0; k < n_samples; ++k) {
        const Vec p = random_gradient(h.dim(), rng);
        const Vec x = random_point(h.domain(), rng);
        const Vec y = (k % 2 == 0) ? random_point(h.domain(), rng)
                                   : h.domain().clamp(nearby(x, diam, rng));
        const double hx = h.evaluate(p, x);
        const double hy = h.evaluate(p, y);
        const double bound = (h.c3() * std::pow(p.norm(), h.m()) + h.c1()) * (x - y).norm();
        const double violation = (std::abs(hx - hy) - bound) / (1.0 + std::abs(hx) + std::abs(hy));
        wc.offer(violation, [&] {
            std::vector<double> w;
            append(w, p);
            append(w, x);
            append(w, y);
            return w;
        });
    }
    return finish("x_continuity", wc, n_samples, seed,
                  "witness = (p, x, y); violation / (1 + |H(p,x)| + |H(p,y)|)");
}

CheckReport verify_p_continuity(const Hamiltonian& h, int n_samples, std::uint64_t seed) {
    require_samples(n_samples);
    std::mt19937_64 rng(seed);
    WorstCase wc;
    for (int k = 0; k < n_samples; ++k) {
        const Vec x = random_point(h.domain(), rng);
        const Vec p = random_gradient(h.dim(), rng);
        const Vec q = (k % 2 == 0) ? random_gradient(h.dim(), rng)
                                   : nearby(p, std::max(1e-3, p.norm()), rng);
        const double hp = h.evaluate(p, x);
        const double hq = h.evaluate(q, x);
        const double bound =
            h.c3() * std::pow(p.norm() + q.norm() + 1.0, h.m() - 1.0) * (p - q).norm();
        const double violation = (std::abs(hp - hq) - bound) / (1.0 + std::abs(hp) + std::abs(hq));
        wc.offer(violation, [&] {
            std::vector<double> w;
            append(w, p);
            append(w, q);
            append(w, x);
            return w;
        });
    }
    return finish("p_continuity", wc, n_samples, seed,
                  "witness = (p, q, x); violation / (1 + |H(p,x)| + |H(q,x)|)");
}

double gamma_exponent(double m) {
    if (!(m > 2.0)) throw InvalidArgument("Hoelder exponent requires m > 2");
    return (m - 2.0) / (m - 1.0);
}

}  // namespace hjfb
