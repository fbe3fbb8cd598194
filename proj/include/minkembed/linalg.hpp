#pragma once

// Small dense linear algebra for the pointwise work (matrix sides <= ~16).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace minkembed {

using Vector = std::vector<double>;

/// Row-major dense real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Vector operator*(const Matrix& a, std::span<const double> v);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& a);

/// Symmetric matrix stored as its upper triangle; reads mirror.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);

  /// Takes the upper triangle of `m`. Throws InvalidInput when `m` is not
  /// square or |m_ij - m_ji| > tol * max(1, max|m|).
  static SymMatrix from_matrix(const Matrix& m, double tol = 1e-12);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);
  Matrix to_matrix() const;

  bool operator==(const SymMatrix& other) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.column(k) <-> values[k]
};

/// Cyclic Jacobi eigensolver. Eigenvalues ascending (stable for ties);
/// each eigenvector is signed so that its largest-magnitude component is
/// positive, ties resolved at the lowest index. Throws InvalidInput on
/// non-finite entries.
SymEigen sym_eigen(const SymMatrix& s);

/// |S| = max |lambda| for symmetric input.
double sym_op_norm(const SymMatrix& s);

/// Operator (spectral) norm sup_{|v|=1} |Av|, via the eigenvalues of A^T A.
double op_norm(const Matrix& a);

/// Square root of a symmetric positive semi-definite matrix.
Matrix sym_sqrt(const SymMatrix& s);

struct LuDecomposition {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

LuDecomposition lu_decompose(const Matrix& a);
double determinant(const Matrix& a);
/// Throws InvalidInput if singular.
Matrix inverse(const Matrix& a);
/// Solves A X = B. Throws InvalidInput if singular.
Matrix solve(const Matrix& a, const Matrix& b);

}  // namespace minkembed
