#include "hjfb/symmat.hpp"

#include <algorithm>
#include <string>

#include "hjfb/errors.hpp"

namespace hjfb {

namespace {

void require_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw InvalidArgument("dimension must be in 1..3, got " + std::to_string(dim));
    }
}

void require_same(int a, int b) {
    if (a != b) {
        throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
    }
}

}  // namespace

Vec::Vec(int dim) : dim_(dim) { require_dim(dim); }

Vec::Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
    require_dim(dim_);
    std::copy(values.begin(), values.end(), data_.begin());
}

double Vec::norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += data_[i] * data_[i];
    return std::sqrt(s);
}

double Vec::dot(const Vec& other) const {
    require_same(dim_, other.dim_);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += data_[i] * other.data_[i];
    return s;
}

Vec& Vec::operator+=(const Vec& other) {
    require_same(dim_, other.dim_);
    for (int i = 0; i < dim_; ++i) data_[i] += other.data_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& other) {
    require_same(dim_, other.dim_);
    for (int i = 0; i < dim_; ++i) data_[i] -= other.data_[i];
    return *this;
}

Vec& Vec::operator*=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) data_[i] *= s;
    return *this;
}

SymMat::SymMat(int dim) : dim_(dim) { require_dim(dim); }

SymMat::SymMat(std::initializer_list<std::initializer_list<double>> rows)
    : dim_(static_cast<int>(rows.size())) {
    require_dim(dim_);
    std::vector<double> full;
    full.reserve(static_cast<std::size_t>(dim_ * dim_));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != dim_) {
            throw DimensionMismatch("SymMat rows must form a square matrix");
        }
        full.insert(full.end(), row.begin(), row.end());
    }
    *this = from_full(dim_, full);
}

SymMat SymMat::identity(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMat SymMat::diagonal(const Vec& entries) {
    SymMat m(entries.dim());
    for (int i = 0; i < entries.dim(); ++i) m.set(i, i, entries[i]);
    return m;
}

SymMat SymMat::outer(const Vec& v) {
    SymMat m(v.dim());
    for (int i = 0; i < v.dim(); ++i) {
        for (int j = i; j < v.dim(); ++j) m.set(i, j, v[i] * v[j]);
    }
    return m;
}

SymMat SymMat::from_full(int dim, const std::vector<double>& row_major) {
    SymMat m(dim);
    if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
        throw DimensionMismatch("from_full expects d*d entries");
    }
    for (int i = 0; i < dim; ++i) {
        m.data_[idx(i, i)] = row_major[static_cast<std::size_t>(i * dim + i)];
        for (int j = i + 1; j < dim; ++j) {
            const double a = row_major[static_cast<std::size_t>(i * dim + j)];
            const double b = row_major[static_cast<std::size_t>(j * dim + i)];
            m.set(i, j, 0.5 * (a + b));
        }
    }
    return m;
}

void SymMat::set(int i, int j, double value) noexcept {
    data_[idx(i, j)] = value;
    data_[idx(j, i)] = value;
}

double SymMat::trace() const noexcept {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += data_[idx(i, i)];
    return t;
}

double SymMat::frobenius_dot(const SymMat& other) const {
    require_same(dim_, other.dim_);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) s += data_[idx(i, j)] * other.data_[idx(i, j)];
    }
    return s;
}

double SymMat::max_abs_entry() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) s = std::max(s, std::abs(data_[idx(i, j)]));
    }
    return s;
}

bool SymMat::is_diagonal() const noexcept {
    for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
            if (data_[idx(i, j)] != 0.0) return false;
        }
    }
    return true;
}

SymMat& SymMat::operator+=(const SymMat& other) {
    require_same(dim_, other.dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& other) {
    require_same(dim_, other.dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

SymMat& SymMat::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Vec SymMat::apply(const Vec& v) const {
    require_same(dim_, v.dim());
    Vec r(dim_);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += data_[idx(i, j)] * v[j];
        r[i] = s;
    }
    return r;
}

namespace {

std::vector<EigenPair> eigen_1(const SymMat& m) {
    return {EigenPair{m(0, 0), Vec{1.0}}};
}

std::vector<EigenPair> eigen_2(const SymMat& m) {
    const double a = m(0, 0);
    const double b = m(0, 1);
    const double c = m(1, 1);
    const double mean = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    const double radius = std::hypot(half_diff, b);
    // Rotation angle of the leading eigenvector; atan2(0, 0) = 0 keeps the
    // axis basis for multiples of the identity.
    const double theta = 0.5 * std::atan2(b, half_diff);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    return {EigenPair{mean + radius, Vec{cs, sn}}, EigenPair{mean - radius, Vec{-sn, cs}}};
}

std::vector<EigenPair> eigen_3(const SymMat& m) {
    double a[3][3];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
    }
    const double scale = std::max(m.max_abs_entry(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off <= 1e-17 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<EigenPair> out;
    for (int k = 0; k < 3; ++k) {
        out.push_back(EigenPair{a[k][k], Vec{v[0][k], v[1][k], v[2][k]}});
    }
    return out;
}

}  // namespace

std::vector<EigenPair> sym_eigen(const SymMat& m) {
    std::vector<EigenPair> pairs;
    switch (m.dim()) {
        case 1: pairs = eigen_1(m); break;
        case 2: pairs = eigen_2(m); break;
        case 3: pairs = eigen_3(m); break;
        default: throw InvalidArgument("sym_eigen supports d <= 3");
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
    return pairs;
}

SymMat reconstruct(const std::vector<EigenPair>& pairs, int dim) {
    SymMat r(dim);
    for (const auto& p : pairs) r += p.value * SymMat::outer(p.vector);
    return r;
}

SymMat positive_part(const SymMat& m) {
    SymMat r(m.dim());
    for (const auto& p : sym_eigen(m)) {
        if (p.value > 0.0) r += p.value * SymMat::outer(p.vector);
    }
    return r;
}

double spectral_norm(const SymMat& m) {
    double s = 0.0;
    for (const auto& p : sym_eigen(m)) s = std::max(s, std::abs(p.value));
    return s;
}

double min_eigenvalue(const SymMat& m) { return sym_eigen(m).back().value; }

}  // namespace hjfb
