#pragma once

// Immersion of a gridded flat Lorentzian metric into Minkowski space:
// frame equation dF/dx^a = F Gamma_a from F(x*) = F*, then df = F from
// f(x*) = 0.

#include "minkembed/grid.hpp"
#include "minkembed/pfaff.hpp"

namespace minkembed {

struct ImmersionResult {
  TensorField f;      // [d]
  TensorField frame;  // [d, d], column a = df/dx^a
  MultiIndex base_point;
  Matrix base_frame;  // F*
  double min_frame_det = 0.0;  // min |det F| over the chart
};

/// Every point must carry exactly one negative eigenvalue, |det g| > eps
/// and |g| < 1/eps; throws NotLorentzAt (first offending point, message
/// names the condition).
void screen_lorentz(const TensorField& g, double epsilon);

/// Full pipeline with F* = lorentz_decompose(g(x*)).
/// Throws NotLorentzAt, SingularFrameAt, plus anything from the pieces.
ImmersionResult immerse_manifold(const TensorField& g, const MultiIndex& x_star, double epsilon,
                                 const SweepOrder& sweep = {});

/// Same with a caller-chosen F* (F*^T eta F* must equal g(x*) to 1e-10,
/// else InvalidInput). No screening.
ImmersionResult immerse_manifold_from_frame(const TensorField& g, const MultiIndex& x_star, const Matrix& f_star,
                                            const SweepOrder& sweep = {});

struct IsometryResidual {
  ResidualReport recomputed;  // (df)^T eta (df) - g with df = partial_derivative(f)
  ResidualReport stored;      // F^T eta F - g with the integrated frame
};

IsometryResidual isometry_residual(const ImmersionResult& result, const TensorField& g, double p);

/// Column a of the returned [d, m] field is partial_derivative(f, a).
TensorField differential(const TensorField& f);

/// A^T eta A - g pointwise for a [d, m] field A and an [m, m] field g.
TensorField pullback_defect(const TensorField& a, const TensorField& g);

}  // namespace minkembed
