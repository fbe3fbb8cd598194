#include "minkembed/manifold.hpp"

#include <cmath>
#include <sstream>

#include "minkembed/error.hpp"
#include "minkembed/lorentz.hpp"

namespace minkembed {

namespace {

void require_metric(const TensorField& g) {
  const auto& sh = g.shape();
  if (sh.size() != 2 || sh[0] != sh[1] || sh[0] != g.chart().dim())
    throw Error(ErrorCode::ShapeMismatch, "metric must have shape [d,d] on a d-dimensional chart");
}

}  // namespace

void screen_lorentz(const TensorField& g, double epsilon) {
  require_metric(g);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidInput, "epsilon must lie in (0, 1]");
  for (std::size_t pt = 0; pt < g.points(); ++pt) {
    const auto eig = sym_eigen(SymMatrix::from_matrix(g.matrix_at(pt)));
    std::size_t negatives = 0;
    double det = 1.0;
    for (double l : eig.values) {
      if (l < 0.0) ++negatives;
      det *= l;
    }
    const double norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    std::ostringstream msg;
    if (negatives != 1 || det == 0.0)
      msg << "metric has " << negatives << " negative eigenvalues";
    else if (!(std::abs(det) > epsilon))
      msg << "|det g| = " << std::abs(det) << " violates |det g| > epsilon = " << epsilon;
    else if (!(norm < 1.0 / epsilon))
      msg << "|g| = " << norm << " violates |g| < 1/epsilon = " << 1.0 / epsilon;
    else
      continue;
    throw Error(ErrorCode::NotLorentzAt, msg.str(), pt);
  }
}

ImmersionResult immerse_manifold(const TensorField& g, const MultiIndex& x_star, double epsilon,
                                 const SweepOrder& sweep) {
  screen_lorentz(g, epsilon);
  if (!g.chart().contains(x_star)) throw Error(ErrorCode::InvalidInput, "base point outside the chart");
  const auto cert = certify_lorentz(SymMatrix::from_matrix(g.matrix_at(g.chart().linear(x_star))), epsilon);
  return immerse_manifold_from_frame(g, x_star, lorentz_decompose(cert).base_f, sweep);
}

ImmersionResult immerse_manifold_from_frame(const TensorField& g, const MultiIndex& x_star, const Matrix& f_star,
                                            const SweepOrder& sweep) {
  require_metric(g);
  if (!g.chart().contains(x_star)) throw Error(ErrorCode::InvalidInput, "base point outside the chart");
  const std::size_t d = g.shape()[0];
  const std::size_t star = g.chart().linear(x_star);
  if (f_star.rows() != d || f_star.cols() != d) throw Error(ErrorCode::ShapeMismatch, "F* must be d x d");
  if (max_abs_diff(mink_gram(f_star, f_star), g.matrix_at(star)) > 1e-10 * std::max(1.0, max_abs(g.matrix_at(star))))
    throw Error(ErrorCode::InvalidInput, "F* does not decompose g(x*)");

  const PfaffCoeffs coeffs = PfaffCoeffs::from_christoffel(christoffel(g));
  TensorField frame = pfaff_integrate(coeffs, x_star, f_star, sweep);

  const double det_star = determinant(f_star);
  double min_det = kInfinity;
  for (std::size_t pt = 0; pt < frame.points(); ++pt) {
    const double det = determinant(frame.matrix_at(pt));
    if (det == 0.0 || std::signbit(det) != std::signbit(det_star)) {
      std::ostringstream msg;
      msg << "det F changes sign (det F = " << det << ", det F* = " << det_star << ")";
      throw Error(ErrorCode::SingularFrameAt, msg.str(), pt);
    }
    min_det = std::min(min_det, std::abs(det));
  }

  TensorField f = poincare_integrate(frame, x_star, Vector(d, 0.0), sweep);
  return ImmersionResult{std::move(f), std::move(frame), x_star, f_star, min_det};
}

TensorField differential(const TensorField& f) {
  if (f.shape().size() != 1) throw Error(ErrorCode::ShapeMismatch, "expected a vector-valued field");
  const std::size_t d = f.shape()[0];
  const std::size_t m = f.chart().dim();
  TensorField df(f.chart(), {d, m});
  for (std::size_t a = 0; a < m; ++a) {
    const TensorField da = partial_derivative(f, a);
    for (std::size_t pt = 0; pt < f.points(); ++pt)
      for (std::size_t r = 0; r < d; ++r) df(pt, r * m + a) = da(pt, r);
  }
  return df;
}

TensorField pullback_defect(const TensorField& a, const TensorField& g) {
  if (a.shape().size() != 2 || g.shape() != std::vector<std::size_t>{a.shape()[1], a.shape()[1]})
    throw Error(ErrorCode::ShapeMismatch, "pullback needs A [d, m] and g [m, m]");
  if (!(a.chart() == g.chart())) throw Error(ErrorCode::ChartMismatch, "fields live on different charts");
  TensorField out(g.chart(), g.shape());
  for (std::size_t pt = 0; pt < g.points(); ++pt) out.set_matrix(pt, mink_gram(a.matrix_at(pt), a.matrix_at(pt)) - g.matrix_at(pt));
  return out;
}

IsometryResidual isometry_residual(const ImmersionResult& result, const TensorField& g, double p) {
  return IsometryResidual{make_report({{"recomputed", pullback_defect(differential(result.f), g)}}, p),
                          make_report({{"stored", pullback_defect(result.frame, g)}}, p)};
}

}  // namespace minkembed
