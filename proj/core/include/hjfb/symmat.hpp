#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace hjfb {

inline constexpr int kMaxDim = 3;

/// Fixed-capacity real vector of dimension 1..3. Unused slots are zero.
class Vec {
public:
    Vec() = default;
    explicit Vec(int dim);
    Vec(std::initializer_list<double> values);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    double& operator[](int i) noexcept { return data_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return data_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] double norm() const noexcept;
    [[nodiscard]] double dot(const Vec& other) const;

    Vec& operator+=(const Vec& other);
    Vec& operator-=(const Vec& other);
    Vec& operator*=(double s) noexcept;

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
    friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
    friend bool operator==(const Vec&, const Vec&) = default;

private:
    int dim_ = 0;
    std::array<double, kMaxDim> data_{};
};

/// Dense symmetric d x d matrix, d in {1,2,3}.
///
/// Symmetry is structural: the only way to set an off-diagonal entry writes
/// both (i,j) and (j,i), and construction from a full array averages the two
/// triangles.
class SymMat {
public:
    SymMat() = default;
    explicit SymMat(int dim);
    /// Rows of a square matrix; the result is (R + R^T)/2.
    SymMat(std::initializer_list<std::initializer_list<double>> rows);

    static SymMat zero(int dim) { return SymMat(dim); }
    static SymMat identity(int dim);
    static SymMat diagonal(const Vec& entries);
    /// v v^T
    static SymMat outer(const Vec& v);
    /// Symmetric part of a row-major d x d array.
    static SymMat from_full(int dim, const std::vector<double>& row_major);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    double operator()(int i, int j) const noexcept { return data_[idx(i, j)]; }
    void set(int i, int j, double value) noexcept;

    [[nodiscard]] double trace() const noexcept;
    /// Tr(A B) for symmetric A, B.
    [[nodiscard]] double frobenius_dot(const SymMat& other) const;
    [[nodiscard]] double max_abs_entry() const noexcept;
    [[nodiscard]] bool is_diagonal() const noexcept;

    SymMat& operator+=(const SymMat& other);
    SymMat& operator-=(const SymMat& other);
    SymMat& operator*=(double s) noexcept;
    SymMat operator-() const { SymMat r = *this; r *= -1.0; return r; }

    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(double s, SymMat a) noexcept { return a *= s; }
    friend SymMat operator*(SymMat a, double s) noexcept { return a *= s; }
    friend bool operator==(const SymMat&, const SymMat&) = default;

    [[nodiscard]] Vec apply(const Vec& v) const;

private:
    static constexpr std::size_t idx(int i, int j) noexcept {
        return static_cast<std::size_t>(i * kMaxDim + j);
    }
    int dim_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

struct EigenPair {
    double value;
    Vec vector;  // unit length
};

/// Eigen-decomposition sorted by descending eigenvalue. Closed form for
/// d <= 2, cyclic Jacobi rotations for d = 3.
std::vector<EigenPair> sym_eigen(const SymMat& m);

/// Sum over positive eigenvalues of lambda_i v_i v_i^T.
SymMat positive_part(const SymMat& m);

/// max_i |lambda_i|
double spectral_norm(const SymMat& m);

/// Smallest eigenvalue.
double min_eigenvalue(const SymMat& m);

/// Reassemble sum lambda_i v_i v_i^T.
SymMat reconstruct(const std::vector<EigenPair>& pairs, int dim);

}  // namespace hjfb
