#pragma once

// Pfaff systems dY/dx^a = Y A_a + B_a Y + C_a on a rectangular chart:
// compatibility residuals, whole-chart integration, path integration,
// Poincare systems df = F and continuous-dependence measurements.

#include <cstddef>
#include <vector>

#include "minkembed/grid.hpp"
#include "minkembed/linalg.hpp"

namespace minkembed {

/// Per-axis coefficient fields. Y is q x l; A_a is l x l, B_a is q x q,
/// C_a is q x l. B and C are either empty (zero) or hold one field per axis.
struct PfaffCoeffs {
  GridChart chart;
  std::size_t q = 0;
  std::size_t l = 0;
  std::vector<TensorField> a;
  std::vector<TensorField> b;
  std::vector<TensorField> c;

  /// Throws ShapeMismatch / ChartMismatch on inconsistent data.
  void validate() const;

  /// A_a with (A_a)[s][b] = Gamma^s_{ab}, so that the frame equation reads
  /// dF/dx^a = F A_a.
  static PfaffCoeffs from_christoffel(const TensorField& gamma);
  /// A = B = 0, C_a = column a of F (shape [d, m]); Y is the d x 1 column f.
  static PfaffCoeffs poincare(const TensorField& f);
};

/// Order in which the axis-fan sweep visits the axes; empty means 0..m-1.
using SweepOrder = std::vector<std::size_t>;

/// Y over the whole chart with Y(x0) = Y0 exactly: RK4 along axis s0
/// through x0, then from every point reached along s1, and so on. Throws
/// NonFiniteState (with the point) if the state overflows.
TensorField pfaff_integrate(const PfaffCoeffs& coeffs, const MultiIndex& x0, const Matrix& y0,
                            const SweepOrder& sweep = {});

struct StaircaseMove {
  std::size_t axis = 0;
  int direction = 1;  // +1 or -1
  std::size_t steps = 0;
};

struct StaircasePath {
  MultiIndex start;
  std::vector<StaircaseMove> moves;

  /// Throws PathOutOfChart when any segment leaves the chart.
  MultiIndex end(const GridChart& chart) const;
};

/// Value at the end of the path, integrating the segments in order.
Matrix pfaff_integrate_path(const PfaffCoeffs& coeffs, const StaircasePath& path, const Matrix& y0);

/// Residuals of the three relations, labelled "A[ab]", "B[ab]", "C[ab]"
/// for every axis pair a < b:
///   d_a A_b - d_b A_a - A_b A_a + A_a A_b
///   d_a B_b - d_b B_a - B_a B_b + B_b B_a
///   d_a C_b - d_b C_a - (C_b A_a - C_a A_b + B_a C_b - B_b C_a)
ResidualReport pfaff_compatibility_residual(const PfaffCoeffs& coeffs, double p);
/// The labelled residual fields behind pfaff_compatibility_residual.
std::vector<std::pair<std::string, TensorField>> pfaff_compatibility_fields(const PfaffCoeffs& coeffs);

/// Column curl d_a F_b - d_b F_a of a [d, m] field, labelled "curl[ab]".
ResidualReport poincare_compatibility_residual(const TensorField& f, double p);

/// f with f(x0) = f0 and df = F (shape [d] output).
TensorField poincare_integrate(const TensorField& f, const MultiIndex& x0, const Vector& f0,
                               const SweepOrder& sweep = {});

struct DependenceGap {
  double gap_norm = 0.0;   // W^{1,p}(Y - Y~)
  double input_gap = 0.0;  // max|Y0 - Y0~| + sum_a L^p gaps of A_a, B_a, C_a
};

DependenceGap pfaff_dependence_gap(const PfaffCoeffs& c1, const PfaffCoeffs& c2, const Matrix& y01,
                                   const Matrix& y02, const MultiIndex& x0, double p,
                                   const SweepOrder& sweep = {});

}  // namespace minkembed
