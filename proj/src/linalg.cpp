#include "minkembed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minkembed/error.hpp"

namespace minkembed {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw Error(ErrorCode::InvalidInput, "ragged matrix literal");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::ShapeMismatch, "matrix sum shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorCode::ShapeMismatch, "matrix difference shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::ShapeMismatch, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size())
    throw Error(ErrorCode::ShapeMismatch, "matrix-vector shape mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix comparison shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double x) { return std::isfinite(x); });
}

// --- SymMatrix --------------------------------------------------------------

SymMatrix::SymMatrix(std::size_t dim)
    : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

std::size_t SymMatrix::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // row i of the upper triangle starts after i rows of decreasing length
  return i * dim_ - i * (i - 1) / 2 + (j - i);
}

double SymMatrix::operator()(std::size_t i, std::size_t j) const {
  return packed_[index(i, j)];
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  packed_[index(i, j)] = value;
}

SymMatrix SymMatrix::from_matrix(const Matrix& m, double tol) {
  if (!m.square()) throw Error(ErrorCode::InvalidInput, "symmetric matrix must be square");
  const double scale = std::max(1.0, max_abs(m));
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol * scale)
        throw Error(ErrorCode::InvalidInput, "matrix is not symmetric");
      s.set(i, j, m(i, j));
    }
  return s;
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

// --- eigen ------------------------------------------------------------------

SymEigen sym_eigen(const SymMatrix& s) {
  const std::size_t n = s.dim();
  Matrix a = s.to_matrix();
  if (!all_finite(a)) throw Error(ErrorCode::InvalidInput, "non-finite matrix entry");
  Matrix v = Matrix::identity(n);

  double frob2 = 0.0;
  for (double x : a.data()) frob2 += x * x;
  const double target = 1e-14 * std::sqrt(frob2);

  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(lead, src))) lead = i;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

double sym_op_norm(const SymMatrix& s) {
  if (s.dim() == 0) return 0.0;
  const auto eig = sym_eigen(s);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

double op_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Matrix ata = a.transpose() * a;
  SymMatrix s(ata.rows());
  for (std::size_t i = 0; i < ata.rows(); ++i)
    for (std::size_t j = i; j < ata.cols(); ++j) s.set(i, j, 0.5 * (ata(i, j) + ata(j, i)));
  const auto eig = sym_eigen(s);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

Matrix sym_sqrt(const SymMatrix& s) {
  const auto eig = sym_eigen(s);
  const std::size_t n = s.dim();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::sqrt(std::max(0.0, eig.values[k]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += r * eig.vectors(i, k) * eig.vectors(j, k);
  }
  // exact symmetry
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = m;
      out(j, i) = m;
    }
  return out;
}

// --- LU -----------------------------------------------------------------------

LuDecomposition lu_decompose(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::InvalidInput, "LU needs a square matrix");
  const std::size_t n = a.rows();
  LuDecomposition d{a, std::vector<std::size_t>(n), 1, false};
  std::iota(d.perm.begin(), d.perm.end(), 0);
  Matrix& lu = d.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == 0.0) {
      d.singular = true;
      continue;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(d.perm[k], d.perm[piv]);
      d.sign = -d.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      const double f = lu(i, k);
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return d;
}

double determinant(const Matrix& a) {
  const auto d = lu_decompose(a);
  if (d.singular) return 0.0;
  double det = d.sign;
  for (std::size_t i = 0; i < a.rows(); ++i) det *= d.lu(i, i);
  return det;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  const auto d = lu_decompose(a);
  if (d.singular) throw Error(ErrorCode::InvalidInput, "singular matrix");
  const std::size_t n = a.rows();
  if (b.rows() != n) throw Error(ErrorCode::ShapeMismatch, "solve: rhs rows mismatch");
  Matrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b(d.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) acc -= d.lu(i, j) * y[j];
      y[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double acc = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) acc -= d.lu(ii, j) * x(j, c);
      x(ii, c) = acc / d.lu(ii, ii);
    }
  }
  return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

}  // namespace minkembed
