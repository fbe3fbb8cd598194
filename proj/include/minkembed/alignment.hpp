#pragma once

// Base-point maps between two reconstructions and discrete Sobolev gaps.
//
// Isometry modes use the two-map form: pi = F(G(x*)) df(x*)^{-1} for each
// input, both decompositions anchored at the midpoint of the two base
// matrices, and the gap of pi~ o f~ - pi o f. The reported single map is
// sigma = pi~^{-1} o pi, which carries the first reconstruction onto the
// second. Images of x* are pinned to the origin.

#include <optional>

#include "minkembed/grid.hpp"
#include "minkembed/hypersurface.hpp"
#include "minkembed/lorentz.hpp"
#include "minkembed/manifold.hpp"

namespace minkembed {

/// y -> Q y + v with Q invertible.
struct AffineMap {
  Matrix q;
  Vector v;

  static AffineMap identity(std::size_t d);
  Vector apply(std::span<const double> y) const;
  /// Applied to every sample of a [d] field.
  TensorField apply(const TensorField& f) const;
  /// Q alone, for vector fields such as the rigging.
  TensorField apply_linear(const TensorField& f) const;
  AffineMap inverse() const;
  /// (this o other)(y) = this(other(y))
  AffineMap compose(const AffineMap& other) const;
};

struct AlignmentResult {
  AffineMap map;                         // sigma, first onto second
  std::optional<MinkIsometry> isometry;  // sigma as an isometry (isometry modes)
  AffineMap first;                       // pi
  AffineMap second;                      // pi~
  double aligned_gap_w2p = 0.0;
  double aligned_gap_max = 0.0;
  double input_gap = 0.0;
};

/// L^p norm of f1 - f2 plus those of all its derivatives up to `order`.
/// Throws ShapeMismatch, ChartMismatch.
double sobolev_gap(const TensorField& f1, const TensorField& f2, int order, double p);

/// Aligned gap W^{2,p}(pi~ o f~ - pi o f); input gap W^{1,p}(g~ - g).
/// Throws ChartMismatch.
AlignmentResult align_manifold(const ImmersionResult& r1, const ImmersionResult& r2, const TensorField& g1,
                               const TensorField& g2, double p, double epsilon = 0.1);

/// Rigged mode: sigma = (Q, v) with Q = F~(x*) F(x*)^{-1}, v = f~(x*) - Q f(x*).
/// Gap W^{2,p}(f~ - sigma o f) + W^{1,p}(l~ - Q l); input gap is the sum of
/// the L^p gaps of Gamma, K, L and M.
AlignmentResult align_hypersurface(const RiggedImmersionResult& r1, const RiggedImmersionResult& r2,
                                   const RiggedOperators& ops1, const RiggedOperators& ops2, double p);

/// Forms mode: two-map form with frames of diag(g(x*), lambda) oriented to
/// det > 0. Gap W^{2,p}(pi~ o f~ - pi o f) + W^{1,p}(Q~ l~ - Q l); input gap
/// W^{1,p}(g~ - g) + L^p(K~ - K). With proper_required a map with det < 0
/// throws NotProper.
AlignmentResult align_hypersurface(const RiggedImmersionResult& r1, const RiggedImmersionResult& r2,
                                   const FundamentalForms& forms1, const FundamentalForms& forms2, double p,
                                   double epsilon, bool proper_required);

}  // namespace minkembed
