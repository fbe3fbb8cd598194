#pragma once

// Linear algebra over the Minkowski form eta = diag(-1, 1, ..., 1):
// Lorentz-matrix certification, the decomposition G = F^T eta F with
// |F| = |G|^{1/2}, its anchored (Lipschitz) continuation, and
// Minkowski-orthogonality tests.

#include <cstddef>

#include "minkembed/linalg.hpp"

namespace minkembed {

/// The Minkowski form of dimension d: index 0 is the timelike slot.
struct MinkForm {
  std::size_t dim = 0;

  explicit MinkForm(std::size_t d);
  double operator[](std::size_t i) const noexcept { return i == 0 ? -1.0 : 1.0; }
  Matrix matrix() const;
};

/// eta(x, y) = -x0 y0 + sum_i xi yi.
double mink_dot(std::span<const double> x, std::span<const double> y);

/// A^T eta B.
Matrix mink_gram(const Matrix& a, const Matrix& b);

/// A symmetric matrix known to lie in the class L_eps: exactly one negative
/// eigenvalue, |det| > eps and |G| < 1/eps.
struct LorentzMatrixCert {
  SymMatrix matrix;
  double epsilon = 1.0;
  Vector eigvals;  // ascending
  Matrix eigvecs;  // matching orthonormal columns
  double det = 0.0;
  double norm = 0.0;
};

/// Throws WrongSignature or OutOfClass (message names the violated bound);
/// InvalidInput when epsilon is outside (0, 1].
LorentzMatrixCert certify_lorentz(const SymMatrix& s, double epsilon);

/// Base data of the decomposition map: the map is anchored at `base`.
struct DecompAnchor {
  LorentzMatrixCert base;
  Matrix base_f;        // F = A P^T
  Matrix basis;         // P
  double lambda0 = 0.0;
  Vector p0;
};

/// F = diag((-l0)^{1/2}, l1^{1/2}, ...) P^T for the eigen-decomposition of G.
DecompAnchor lorentz_decompose(const LorentzMatrixCert& g);

/// Which construction lorentz_decompose_anchored used.
enum class DecompBranch { Identity, Near, Far };

struct AnchoredDecomp {
  Matrix f;
  DecompBranch branch = DecompBranch::Far;
};

/// The continuation F~ of the anchored map at G~. Far branch
/// (|G~ - G| >= 2 eps^d): a fresh decomposition of G~. Near branch: the
/// negative eigenvector of G~ oriented towards p0, Gram-Schmidt of
/// (p~0, p1, ..., pn) and the block square root.
/// Throws EpsilonMismatch, NearBranchDegenerate.
AnchoredDecomp lorentz_decompose_anchored_ex(const DecompAnchor& anchor,
                                             const LorentzMatrixCert& gt);

Matrix lorentz_decompose_anchored(const DecompAnchor& anchor,
                                  const LorentzMatrixCert& gt);

struct MinkOrthogonality {
  bool orthogonal = false;
  bool proper = false;
};

/// orthogonal <=> max|Q^T eta Q - eta| <= tol; proper additionally needs
/// |det Q - 1| <= tol.
MinkOrthogonality is_mink_orthogonal(const Matrix& q, double tol);

/// y -> v + Q y with Q^T eta Q = eta.
struct MinkIsometry {
  Matrix q;
  Vector v;
  bool proper = true;

  /// Validates the invariants (tolerance 1e-10); throws InvalidInput.
  static MinkIsometry make(Matrix q, Vector v);
  static MinkIsometry identity(std::size_t d);

  Vector apply(std::span<const double> y) const;
  MinkIsometry inverse() const;
  /// (this o other)(y) = this(other(y))
  MinkIsometry compose(const MinkIsometry& other) const;
};

/// Constant C(n) of the Lipschitz bound, accumulated from the proof's
/// steps: Gram-Schmidt cascade 2^{n-1/2}, eigenvector tilt 1/sqrt(2),
/// square-root map sqrt(n)/2, plus the far-branch constant 1.
double lipschitz_prefactor(std::size_t n);

/// C(n) * eps^{-(3n+5)/2}; an upper bound, not a sharp constant.
double lipschitz_constant(double epsilon, std::size_t n);

}  // namespace minkembed
