#pragma once

// Hypersurfaces of Minkowski space from gridded intrinsic data.
//
// Rigged data (Gamma, K, L, M) on an n-dimensional chart drive the frame
// F = [df/dx^1 ... df/dx^n, l] of size (n+1) x (n+1) through dF/dx^i = F A_i,
//
//   A_i = | Gamma^k_{ih}   L^k_i |    rows k (tangent) and n (rigging),
//         | -K_{ih}        -M_i  |    columns h (tangent) and n,
//
// i.e. d_i d_h f = Gamma^k_{ih} d_k f - K_{ih} l and d_i l = L^k_i d_k f - M_i l.
// Fundamental forms (g, K, lambda) with lambda = eta(l, l) = -1 (spacelike
// hypersurface) or +1 (timelike) specialise to the Levi-Civita connection,
// L = lambda K^sharp and M = 0.

#include <vector>

#include "minkembed/grid.hpp"
#include "minkembed/manifold.hpp"
#include "minkembed/pfaff.hpp"

namespace minkembed {

struct RiggedOperators {
  GridChart chart;
  TensorField gamma;  // [n,n,n], Gamma^k_{ij} at (k*n + i)*n + j
  TensorField k;      // [n,n], symmetric
  TensorField l;      // [n,n], L^k_j at k*n + j
  TensorField m;      // [n]

  /// Shapes, shared chart and the two symmetries (to 1e-12). Throws
  /// ShapeMismatch, ChartMismatch, InvalidInput.
  void validate() const;
};

struct FundamentalForms {
  GridChart chart;
  TensorField g;  // [n,n]
  TensorField k;  // [n,n]
  int lambda = -1;

  /// Throws MixedSignature when g is neither Riemannian everywhere nor
  /// Lorentzian everywhere, InvalidInput when lambda disagrees with the
  /// signature (-1 for Riemannian g, +1 for Lorentzian g).
  void validate() const;
};

struct RiggedImmersionResult {
  TensorField f;        // [n+1]
  TensorField rigging;  // [n+1]
  TensorField frame;    // [n+1, n+1]
  MultiIndex base_point;
  Matrix base_frame;
  double min_frame_det = 0.0;
};

PfaffCoeffs assemble_rigging_coeffs(const RiggedOperators& ops);

/// Pointwise residual fields of the generalised Gauss-Codazzi equations,
/// stored for all pairs i, j (antisymmetric):
///   gauss[k,h,i,j] = R^k_{hij} + K_{ih} L^k_j - K_{jh} L^k_i
///   codazzi1[i,j,h] = nabla_i K_{jh} - nabla_j K_{ih} - K_{jh} M_i + K_{ih} M_j
///   codazzi2[k,i,j] = nabla_i L^k_j - nabla_j L^k_i - L^k_i M_j + L^k_j M_i
///   codazzi3[i,j] = nabla_i M_j - nabla_j M_i - K_{jh} L^h_i + K_{ih} L^h_j
/// with
///   nabla_i K_{jh} = d_i K_{jh} - Gamma^m_{ij} K_{mh} - Gamma^m_{ih} K_{jm}
///   nabla_i L^k_j  = d_i L^k_j + Gamma^k_{im} L^m_j - Gamma^m_{ij} L^k_m
///   nabla_i M_j    = d_i M_j - Gamma^m_{ij} M_m
/// For the pair (i, j) these are the blocks of the compatibility residual
/// Z_ij of the coefficients A_i: Z[k][h] = gauss, Z[k][n] = codazzi2,
/// Z[n][h] = -codazzi1, Z[n][n] = -codazzi3.
struct GaussCodazziFields {
  TensorField gauss;
  TensorField codazzi1;
  TensorField codazzi2;
  TensorField codazzi3;
};

GaussCodazziFields generalized_gc_fields(const RiggedOperators& ops);
/// Families "gauss", "codazzi1", "codazzi2", "codazzi3".
ResidualReport generalized_gc_residual(const RiggedOperators& ops, double p);

/// Throws SingularFstar when F* is not invertible, SingularFrameAt when
/// det F changes sign.
RiggedImmersionResult immerse_hypersurface_rigged(const RiggedOperators& ops, const MultiIndex& x_star,
                                                  const Matrix& f_star, const SweepOrder& sweep = {});

/// Residual of the reconstruction equations with recomputed derivatives:
/// "tangent": d_i d_h f - Gamma^k_{ih} d_k f + K_{ih} l,
/// "rigging": d_i l - L^k_i d_k f + M_i l.
ResidualReport rigged_structure_defect(const RiggedImmersionResult& result, const RiggedOperators& ops, double p);

/// Operators read back from (f, l): A_i = F^{-1} d_i F with F = [df | l]
/// built from finite differences. Invariant under f -> Q f + v, l -> Q l.
RiggedOperators reconstruct_operators(const TensorField& f, const TensorField& rigging);

/// Gamma = christoffel(g), L^k_i = lambda g^{kh} K_{hi}, M = 0.
RiggedOperators specialize_from_forms(const FundamentalForms& forms);

/// gauss[k,h,i,j] = R^k_{hij} + lambda (K_{ih} K^k_j - K_{jh} K^k_i),
/// codazzi[i,j,h] = nabla_i K_{jh} - nabla_j K_{ih}, K^k_j = g^{km} K_{mj}.
struct ClassicalGcFields {
  TensorField gauss;
  TensorField codazzi;
};

ClassicalGcFields classical_gc_fields(const FundamentalForms& forms);
/// Families "gauss", "codazzi".
ResidualReport classical_gc_residual(const FundamentalForms& forms, double p);

/// F itself when det F > 0; otherwise -F when the size is odd, or F with
/// its last row negated when it is even. Preserves F^T eta F.
Matrix orient_positive(Matrix f);

/// F* for the forms pipeline: the decomposition of diag(g(x*), lambda),
/// adjusted to det F* > 0 (negated when n+1 is odd, last row negated
/// otherwise). Throws NotLorentzBlock.
Matrix forms_initial_frame(const FundamentalForms& forms, const MultiIndex& x_star, double epsilon);

RiggedImmersionResult immerse_hypersurface_forms(const FundamentalForms& forms, const MultiIndex& x_star,
                                                 double epsilon, const SweepOrder& sweep = {});

/// Families "first": (df)^T eta df - g; "second": lambda eta(d_h f, d_i l) - K_{hi};
/// "normal": eta(l, l) - lambda; "orthogonal": eta(l, d_i f). All derivatives
/// recomputed from the outputs.
ResidualReport fundamental_form_defect(const RiggedImmersionResult& result, const FundamentalForms& forms,
                                       double p);

}  // namespace minkembed
