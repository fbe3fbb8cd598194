#pragma once

// Rectangular charts, sampled tensor fields and finite-difference tensor
// calculus (metric inverse, Christoffel symbols, Riemann curvature).
//
// Point ordering is lexicographic with the last axis varying fastest
// (C order): linear = ((i0 * n1 + i1) * n2 + i2) ... Components of a field
// are flattened row-major over its shape, so g_{ab} sits at a * d + b and
// Gamma^s_{ab} at (s * d + a) * d + b.

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "minkembed/linalg.hpp"

namespace minkembed {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Axis {
  double min = 0.0;
  double max = 1.0;
  std::size_t samples = 0;

  double spacing() const noexcept { return (max - min) / static_cast<double>(samples - 1); }
  double coord(std::size_t i) const noexcept;
  bool operator==(const Axis&) const = default;
};

using MultiIndex = std::vector<std::size_t>;

class GridChart {
 public:
  GridChart() = default;
  /// Throws InvalidInput unless min < max (finite) and samples >= 4 per axis.
  explicit GridChart(std::vector<Axis> axes);

  /// Same bounds and sample count on every axis.
  static GridChart uniform(std::size_t dim, double min, double max, std::size_t samples);

  std::size_t dim() const noexcept { return axes_.size(); }
  const Axis& axis(std::size_t a) const { return axes_.at(a); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }
  std::size_t points() const noexcept { return points_; }
  std::size_t stride(std::size_t a) const { return strides_.at(a); }
  double spacing(std::size_t a) const { return axes_.at(a).spacing(); }
  double volume() const;

  std::size_t linear(const MultiIndex& idx) const;
  MultiIndex multi(std::size_t linear) const;
  Vector coords(std::size_t linear) const;
  bool contains(const MultiIndex& idx) const;
  /// Grid point nearest to the middle of the chart (floor(samples/2) per axis).
  MultiIndex center() const;

  bool operator==(const GridChart& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t points_ = 0;
};

/// Component multi-index pairs (i, j) with T_{..i..j..} = T_{..j..i..}.
struct SymmetryPair {
  std::size_t first;
  std::size_t second;
};

class TensorField {
 public:
  TensorField() = default;
  /// Zero field.
  TensorField(GridChart chart, std::vector<std::size_t> shape);
  /// Throws ShapeMismatch when data has the wrong length, InvalidInput for
  /// non-finite samples or a declared symmetry that does not hold within
  /// 1e-12 (relative); declared symmetries are then made exact.
  TensorField(GridChart chart, std::vector<std::size_t> shape, std::vector<double> data,
              std::vector<SymmetryPair> symmetries = {});

  /// Samples fn(coords, out) at every grid point.
  template <class Fn>
  static TensorField sample(const GridChart& chart, std::vector<std::size_t> shape, Fn&& fn,
                            std::vector<SymmetryPair> symmetries = {});

  const GridChart& chart() const noexcept { return chart_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t components() const noexcept { return comps_; }
  std::size_t points() const noexcept { return chart_.points(); }

  std::span<double> at(std::size_t point) { return {data_.data() + point * comps_, comps_}; }
  std::span<const double> at(std::size_t point) const { return {data_.data() + point * comps_, comps_}; }
  double& operator()(std::size_t point, std::size_t comp) { return data_[point * comps_ + comp]; }
  double operator()(std::size_t point, std::size_t comp) const { return data_[point * comps_ + comp]; }

  /// The components at `point` as a matrix (rank-2 shapes only).
  Matrix matrix_at(std::size_t point) const;
  void set_matrix(std::size_t point, const Matrix& m);

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool all_finite() const;

 private:
  GridChart chart_;
  std::vector<std::size_t> shape_;
  std::size_t comps_ = 1;
  std::vector<double> data_;
};

template <class Fn>
TensorField TensorField::sample(const GridChart& chart, std::vector<std::size_t> shape, Fn&& fn,
                                std::vector<SymmetryPair> symmetries) {
  TensorField out(chart, shape);
  for (std::size_t i = 0; i < chart.points(); ++i) {
    const Vector x = chart.coords(i);
    fn(std::span<const double>(x), out.at(i));
  }
  return TensorField(chart, std::move(shape), std::move(out.data_), std::move(symmetries));
}

/// f - g, componentwise. Throws ShapeMismatch / ChartMismatch.
TensorField difference(const TensorField& f, const TensorField& g);

/// Second-order finite difference along `axis`: central in the interior,
/// one-sided four-point stencil at the two boundary faces. Exact for
/// polynomials of degree <= 2. Throws AxisOutOfRange.
TensorField partial_derivative(const TensorField& f, std::size_t axis);

// ---- norms ---------------------------------------------------------------

/// Default Lebesgue exponent for a chart of dimension m.
inline double default_p(std::size_t m) { return static_cast<double>(m) + 2.0; }

/// Pointwise magnitude max_c |f_c(x)|, maximised over the chart.
double max_norm(const TensorField& f);

/// Discrete L^p norm of the pointwise magnitude with trapezoid weights
/// (product of spacings, halved once per boundary face). p = kInfinity
/// gives max_norm.
double lp_norm(const TensorField& f, double p);

/// L^p of f plus L^p of every first derivative (order 1), plus every
/// second derivative d_a d_b, a <= b (order 2).
double sobolev_norm(const TensorField& f, int order, double p);

// ---- residual reports ----------------------------------------------------

struct SubResidual {
  std::string label;
  double max_abs = 0.0;
  double lp_norm = 0.0;
};

struct ResidualReport {
  double max_abs = 0.0;
  double lp_norm = 0.0;
  double p = 2.0;
  std::vector<SubResidual> per_equation;
  GridChart grid;
};

/// Overall max and L^p are taken over the pointwise max of all labelled
/// residual fields (which must share the chart).
ResidualReport make_report(const std::vector<std::pair<std::string, TensorField>>& parts, double p);

// ---- metric calculus -----------------------------------------------------

inline constexpr double kDefaultDetFloor = 1e-10;

/// Pointwise inverse of a [d,d] metric. Throws SingularMetricAt with the
/// point of smallest |det g| when any |det g| < det_floor.
TensorField inverse_metric(const TensorField& g, double det_floor = kDefaultDetFloor);

/// Gamma^s_{ab} = 1/2 g^{sn} (d_a g_{bn} + d_b g_{an} - d_n g_{ab}), shape
/// [d,d,d], exactly symmetric in (a,b).
TensorField christoffel(const TensorField& g, double det_floor = kDefaultDetFloor);

/// R^t_{sab} = d_a Gamma^t_{bs} - d_b Gamma^t_{as}
///           + Gamma^n_{bs} Gamma^t_{an} - Gamma^n_{as} Gamma^t_{bn},
/// shape [d,d,d,d], exactly antisymmetric in (a,b).
TensorField riemann_from_christoffel(const TensorField& gamma);
TensorField riemann(const TensorField& g, double det_floor = kDefaultDetFloor);

/// Max and L^p norms of riemann(g); per_equation lists every component
/// R^t_{sab} with a < b.
ResidualReport flatness_residual(const TensorField& g, double p, double det_floor = kDefaultDetFloor);

}  // namespace minkembed
