#include "minkembed/lorentz.hpp"

#include <cmath>
#include <sstream>

#include "minkembed/error.hpp"

namespace minkembed {

MinkForm::MinkForm(std::size_t d) : dim(d) {
  if (d == 0) throw Error(ErrorCode::InvalidInput, "Minkowski form needs dim >= 1");
}

Matrix MinkForm::matrix() const {
  Matrix m = Matrix::identity(dim);
  m(0, 0) = -1.0;
  return m;
}

double mink_dot(std::span<const double> x, std::span<const double> y) {
  double acc = -x[0] * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

Matrix mink_gram(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "mink_gram row mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = -a(0, i) * b(0, j);
      for (std::size_t k = 1; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

LorentzMatrixCert certify_lorentz(const SymMatrix& s, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::InvalidInput, "epsilon must lie in (0, 1]");
  if (s.dim() < 1) throw Error(ErrorCode::InvalidInput, "empty matrix");
  auto eig = sym_eigen(s);

  std::size_t negatives = 0;
  bool zero = false;
  for (double l : eig.values) {
    if (l < 0.0) ++negatives;
    if (l == 0.0) zero = true;
  }
  if (negatives != 1 || zero) {
    std::ostringstream msg;
    msg << "expected exactly one negative eigenvalue, found " << negatives
        << (zero ? " (and a zero eigenvalue)" : "");
    throw Error(ErrorCode::WrongSignature, msg.str());
  }

  double det = 1.0;
  for (double l : eig.values) det *= l;
  const double norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  if (!(std::abs(det) > epsilon)) {
    std::ostringstream msg;
    msg << "|det G| = " << std::abs(det) << " violates |det G| > epsilon = " << epsilon;
    throw Error(ErrorCode::OutOfClass, msg.str());
  }
  if (!(norm < 1.0 / epsilon)) {
    std::ostringstream msg;
    msg << "|G| = " << norm << " violates |G| < 1/epsilon = " << 1.0 / epsilon;
    throw Error(ErrorCode::OutOfClass, msg.str());
  }
  return LorentzMatrixCert{s, epsilon, std::move(eig.values), std::move(eig.vectors), det, norm};
}

DecompAnchor lorentz_decompose(const LorentzMatrixCert& g) {
  const std::size_t d = g.matrix.dim();
  Vector a(d);
  a[0] = std::sqrt(-g.eigvals[0]);
  for (std::size_t k = 1; k < d; ++k) a[k] = std::sqrt(g.eigvals[k]);
  Matrix f = Matrix::diagonal(a) * g.eigvecs.transpose();
  return DecompAnchor{g, std::move(f), g.eigvecs, g.eigvals[0], g.eigvecs.column(0)};
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void normalize(Vector& x) {
  const double n = std::sqrt(dot(x, x));
  for (double& v : x) v /= n;
}

// Unit eigenvector of the unique negative eigenvalue of gt, by inverse
// iteration seeded with the anchor's p0.
Vector negative_eigenvector(const Matrix& gt, double lambda0, const Vector& seed) {
  const std::size_t d = gt.rows();
  const double shift = lambda0 - 1e-10 * std::max(1.0, std::abs(lambda0));
  Matrix shifted = gt;
  for (std::size_t i = 0; i < d; ++i) shifted(i, i) -= shift;
  Matrix x(d, 1);
  x.set_column(0, seed);
  Vector out = seed;
  for (int it = 0; it < 3; ++it) {
    x = solve(shifted, x);
    out = x.column(0);
    normalize(out);
    x.set_column(0, out);
  }
  if (dot(out, seed) < 0.0)
    for (double& v : out) v = -v;
  return out;
}

}  // namespace

AnchoredDecomp lorentz_decompose_anchored_ex(const DecompAnchor& anchor,
                                             const LorentzMatrixCert& gt) {
  const auto& g = anchor.base;
  if (gt.epsilon != g.epsilon) throw Error(ErrorCode::EpsilonMismatch, "anchor and target certified at different epsilon");
  const std::size_t d = g.matrix.dim();
  if (gt.matrix.dim() != d) throw Error(ErrorCode::ShapeMismatch, "anchor and target dimensions differ");

  if (gt.matrix == g.matrix) return {anchor.base_f, DecompBranch::Identity};

  const Matrix gtm = gt.matrix.to_matrix();
  const SymMatrix diff = SymMatrix::from_matrix(gtm - g.matrix.to_matrix(), 0.0);
  const double gap = sym_op_norm(diff);
  const double threshold = 2.0 * std::pow(g.epsilon, static_cast<double>(d));
  if (gap >= threshold) return {lorentz_decompose(gt).base_f, DecompBranch::Far};

  // Near branch.
  const Vector pt0 = negative_eigenvector(gtm, gt.eigvals[0], anchor.p0);
  std::vector<Vector> v(d);
  v[0] = pt0;
  for (std::size_t k = 1; k < d; ++k) {
    Vector w = anchor.basis.column(k);
    // two Gram-Schmidt passes keep V~ orthonormal to rounding
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < k; ++i) {
        const double c = dot(w, v[i]);
        for (std::size_t r = 0; r < d; ++r) w[r] -= c * v[i][r];
      }
    const double len = std::sqrt(dot(w, w));
    if (len < 1e-8)
      throw Error(ErrorCode::NearBranchDegenerate, "Gram-Schmidt vectors are numerically dependent");
    for (double& x : w) x /= len;
    v[k] = std::move(w);
  }

  const Vector gp0 = gtm * std::span<const double>(pt0);
  const double lt0 = dot(pt0, gp0);

  const std::size_t n = d - 1;
  SymMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector gv = gtm * std::span<const double>(v[i + 1]);
    for (std::size_t j = i; j < n; ++j) h.set(i, j, dot(v[j + 1], gv));
  }
  const Matrix hroot = sym_sqrt(h);

  Matrix block(d, d);
  block(0, 0) = std::sqrt(-lt0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) block(i + 1, j + 1) = hroot(i, j);

  Matrix vt(d, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t r = 0; r < d; ++r) vt(k, r) = v[k][r];

  return {block * vt, DecompBranch::Near};
}

Matrix lorentz_decompose_anchored(const DecompAnchor& anchor, const LorentzMatrixCert& gt) {
  return lorentz_decompose_anchored_ex(anchor, gt).f;
}

MinkOrthogonality is_mink_orthogonal(const Matrix& q, double tol) {
  MinkOrthogonality out;
  if (!q.square() || q.rows() == 0) return out;
  const Matrix eta = MinkForm(q.rows()).matrix();
  out.orthogonal = max_abs_diff(mink_gram(q, q), eta) <= tol;
  out.proper = out.orthogonal && std::abs(determinant(q) - 1.0) <= tol;
  return out;
}

MinkIsometry MinkIsometry::make(Matrix q, Vector v) {
  if (!q.square() || q.rows() != v.size())
    throw Error(ErrorCode::ShapeMismatch, "isometry Q/v dimensions differ");
  const auto check = is_mink_orthogonal(q, 1e-10);
  if (!check.orthogonal) throw Error(ErrorCode::InvalidInput, "Q is not Minkowski-orthogonal");
  return MinkIsometry{std::move(q), std::move(v), check.proper};
}

MinkIsometry MinkIsometry::identity(std::size_t d) {
  return MinkIsometry{Matrix::identity(d), Vector(d, 0.0), true};
}

Vector MinkIsometry::apply(std::span<const double> y) const {
  Vector out = q * y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  return out;
}

MinkIsometry MinkIsometry::inverse() const {
  // Q^{-1} = eta Q^T eta
  const Matrix eta = MinkForm(q.rows()).matrix();
  Matrix qi = eta * q.transpose() * eta;
  Vector vi = qi * std::span<const double>(v);
  for (double& x : vi) x = -x;
  return MinkIsometry{std::move(qi), std::move(vi), proper};
}

MinkIsometry MinkIsometry::compose(const MinkIsometry& other) const {
  Vector vv = apply(other.v);
  return MinkIsometry{q * other.q, std::move(vv), proper == other.proper};
}

double lipschitz_prefactor(std::size_t n) {
  const double nn = static_cast<double>(n);
  // |V~ - P| <= c_v |G~ - G| / eps^{n+1}
  const double c_v = std::sqrt(1.0 + nn * std::pow(2.0, 2.0 * nn - 1.0)) / std::sqrt(2.0);
  const double near = std::sqrt(nn) * c_v + std::sqrt(nn) / 2.0 + c_v;
  return std::max(near, 1.0);
}

double lipschitz_constant(double epsilon, std::size_t n) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidInput, "epsilon must lie in (0, 1]");
  if (n < 1) throw Error(ErrorCode::InvalidInput, "n must be >= 1");
  return lipschitz_prefactor(n) * std::pow(epsilon, -(3.0 * static_cast<double>(n) + 5.0) / 2.0);
}

}  // namespace minkembed
