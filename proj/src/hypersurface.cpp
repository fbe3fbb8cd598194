#include "minkembed/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minkembed/error.hpp"
#include "minkembed/lorentz.hpp"

namespace minkembed {

namespace {

using Shape = std::vector<std::size_t>;

void check(const TensorField& f, const GridChart& chart, const Shape& shape, const char* what) {
  if (!(f.chart() == chart)) throw Error(ErrorCode::ChartMismatch, std::string(what) + " lives on another chart");
  if (f.shape() != shape) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has the wrong shape");
}

bool symmetric_pair(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

void RiggedOperators::validate() const {
  const std::size_t n = chart.dim();
  check(gamma, chart, {n, n, n}, "Gamma");
  check(k, chart, {n, n}, "K");
  check(l, chart, {n, n}, "L");
  check(m, chart, {n}, "M");
  for (std::size_t pt = 0; pt < chart.points(); ++pt)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!symmetric_pair(k(pt, i * n + j), k(pt, j * n + i)))
          throw Error(ErrorCode::InvalidInput, "K must be symmetric", pt);
        for (std::size_t s = 0; s < n; ++s)
          if (!symmetric_pair(gamma(pt, (s * n + i) * n + j), gamma(pt, (s * n + j) * n + i)))
            throw Error(ErrorCode::InvalidInput, "Gamma must be symmetric in its lower indices", pt);
      }
}

void FundamentalForms::validate() const {
  const std::size_t n = chart.dim();
  check(g, chart, {n, n}, "g");
  check(k, chart, {n, n}, "K");
  if (lambda != 1 && lambda != -1) throw Error(ErrorCode::InvalidInput, "lambda must be +1 or -1");
  int kind = 0;  // -1 Riemannian, +1 Lorentzian
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    const Matrix gm = g.matrix_at(pt);
    const Matrix km = k.matrix_at(pt);
    const auto eig = sym_eigen(SymMatrix::from_matrix(gm));
    std::size_t negatives = 0;
    for (double v : eig.values) {
      if (v == 0.0) throw Error(ErrorCode::SingularMetricAt, "first fundamental form is degenerate", pt);
      if (v < 0.0) ++negatives;
    }
    const int here = negatives == 0 ? -1 : negatives == 1 ? 1 : 0;
    if (here == 0 || (kind != 0 && here != kind))
      throw Error(ErrorCode::MixedSignature, "first fundamental form must be Riemannian or Lorentzian throughout", pt);
    kind = here;
    SymMatrix::from_matrix(km);
  }
  if (kind != lambda) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " does not match a " << (kind < 0 ? "Riemannian" : "Lorentzian")
        << " first fundamental form (expected " << kind << ")";
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
}

PfaffCoeffs assemble_rigging_coeffs(const RiggedOperators& ops) {
  ops.validate();
  const std::size_t n = ops.chart.dim();
  const std::size_t d = n + 1;
  PfaffCoeffs out{ops.chart, d, d, {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    TensorField a(ops.chart, {d, d});
    for (std::size_t pt = 0; pt < ops.chart.points(); ++pt) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t h = 0; h < n; ++h) a(pt, k * d + h) = ops.gamma(pt, (k * n + i) * n + h);
        a(pt, k * d + n) = ops.l(pt, k * n + i);
      }
      for (std::size_t h = 0; h < n; ++h) a(pt, n * d + h) = -ops.k(pt, i * n + h);
      a(pt, n * d + n) = -ops.m(pt, i);
    }
    out.a.push_back(std::move(a));
  }
  return out;
}

GaussCodazziFields generalized_gc_fields(const RiggedOperators& ops) {
  ops.validate();
  const GridChart& chart = ops.chart;
  const std::size_t n = chart.dim();
  const TensorField r = riemann_from_christoffel(ops.gamma);
  std::vector<TensorField> dk, dl, dm;
  for (std::size_t i = 0; i < n; ++i) {
    dk.push_back(partial_derivative(ops.k, i));
    dl.push_back(partial_derivative(ops.l, i));
    dm.push_back(partial_derivative(ops.m, i));
  }
  GaussCodazziFields out{TensorField(chart, {n, n, n, n}), TensorField(chart, {n, n, n}),
                         TensorField(chart, {n, n, n}), TensorField(chart, {n, n})};
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    auto G = [&](std::size_t s, std::size_t a, std::size_t b) { return ops.gamma(pt, (s * n + a) * n + b); };
    auto K = [&](std::size_t a, std::size_t b) { return ops.k(pt, a * n + b); };
    auto L = [&](std::size_t a, std::size_t b) { return ops.l(pt, a * n + b); };
    auto M = [&](std::size_t a) { return ops.m(pt, a); };
    // nabla_i K_{jh}
    auto nabla_k = [&](std::size_t i, std::size_t j, std::size_t h) {
      double v = dk[i](pt, j * n + h);
      for (std::size_t m = 0; m < n; ++m) v -= G(m, i, j) * K(m, h) + G(m, i, h) * K(j, m);
      return v;
    };
    // nabla_i L^k_j
    auto nabla_l = [&](std::size_t i, std::size_t k, std::size_t j) {
      double v = dl[i](pt, k * n + j);
      for (std::size_t m = 0; m < n; ++m) v += G(k, i, m) * L(m, j) - G(m, i, j) * L(k, m);
      return v;
    };
    // nabla_i M_j
    auto nabla_m = [&](std::size_t i, std::size_t j) {
      double v = dm[i](pt, j);
      for (std::size_t m = 0; m < n; ++m) v -= G(m, i, j) * M(m);
      return v;
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t h = 0; h < n; ++h) {
            const double v = r(pt, ((k * n + h) * n + i) * n + j) + K(i, h) * L(k, j) - K(j, h) * L(k, i);
            out.gauss(pt, ((k * n + h) * n + i) * n + j) = v;
            out.gauss(pt, ((k * n + h) * n + j) * n + i) = -v;
          }
        for (std::size_t h = 0; h < n; ++h) {
          const double v = nabla_k(i, j, h) - nabla_k(j, i, h) - K(j, h) * M(i) + K(i, h) * M(j);
          out.codazzi1(pt, (i * n + j) * n + h) = v;
          out.codazzi1(pt, (j * n + i) * n + h) = -v;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double v = nabla_l(i, k, j) - nabla_l(j, k, i) - L(k, i) * M(j) + L(k, j) * M(i);
          out.codazzi2(pt, (k * n + i) * n + j) = v;
          out.codazzi2(pt, (k * n + j) * n + i) = -v;
        }
        double v = nabla_m(i, j) - nabla_m(j, i);
        for (std::size_t h = 0; h < n; ++h) v += -K(j, h) * L(h, i) + K(i, h) * L(h, j);
        out.codazzi3(pt, i * n + j) = v;
        out.codazzi3(pt, j * n + i) = -v;
      }
  }
  return out;
}

ResidualReport generalized_gc_residual(const RiggedOperators& ops, double p) {
  auto f = generalized_gc_fields(ops);
  return make_report({{"gauss", std::move(f.gauss)},
                      {"codazzi1", std::move(f.codazzi1)},
                      {"codazzi2", std::move(f.codazzi2)},
                      {"codazzi3", std::move(f.codazzi3)}},
                     p);
}

namespace {

// Columns [0, cols) of a [d, d] frame field as a [d, cols] field.
TensorField leading_columns(const TensorField& frame, std::size_t cols) {
  const std::size_t d = frame.shape()[0];
  TensorField out(frame.chart(), {d, cols});
  for (std::size_t pt = 0; pt < frame.points(); ++pt)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < cols; ++c) out(pt, r * cols + c) = frame(pt, r * d + c);
  return out;
}

TensorField column(const TensorField& frame, std::size_t col) {
  const std::size_t d = frame.shape()[0];
  TensorField out(frame.chart(), {d});
  for (std::size_t pt = 0; pt < frame.points(); ++pt)
    for (std::size_t r = 0; r < d; ++r) out(pt, r) = frame(pt, r * d + col);
  return out;
}

}  // namespace

RiggedImmersionResult immerse_hypersurface_rigged(const RiggedOperators& ops, const MultiIndex& x_star,
                                                  const Matrix& f_star, const SweepOrder& sweep) {
  const PfaffCoeffs coeffs = assemble_rigging_coeffs(ops);
  const std::size_t n = ops.chart.dim();
  const std::size_t d = n + 1;
  if (!ops.chart.contains(x_star)) throw Error(ErrorCode::InvalidInput, "base point outside the chart");
  if (f_star.rows() != d || f_star.cols() != d) throw Error(ErrorCode::ShapeMismatch, "F* must be (n+1) x (n+1)");
  const double det_star = determinant(f_star);
  if (!std::isfinite(det_star) || std::abs(det_star) <= 1e-12 * std::pow(std::max(max_abs(f_star), 1e-300), d))
    throw Error(ErrorCode::SingularFstar, "F* is not invertible");

  TensorField frame = pfaff_integrate(coeffs, x_star, f_star, sweep);
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
  TensorField f = poincare_integrate(leading_columns(frame, n), x_star, Vector(d, 0.0), sweep);
  TensorField rig = column(frame, n);
  return RiggedImmersionResult{std::move(f), std::move(rig), std::move(frame), x_star, f_star, min_det};
}

ResidualReport rigged_structure_defect(const RiggedImmersionResult& result, const RiggedOperators& ops, double p) {
  ops.validate();
  const GridChart& chart = ops.chart;
  const std::size_t n = chart.dim();
  const std::size_t d = n + 1;
  std::vector<TensorField> df, dl;
  for (std::size_t i = 0; i < n; ++i) {
    df.push_back(partial_derivative(result.f, i));
    dl.push_back(partial_derivative(result.rigging, i));
  }
  TensorField tangent(chart, {n, n, d});
  TensorField rigging(chart, {n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t h = 0; h < n; ++h) {
      const TensorField ddf = partial_derivative(df[h], i);
      for (std::size_t pt = 0; pt < chart.points(); ++pt)
        for (std::size_t r = 0; r < d; ++r) {
          double v = ddf(pt, r) + ops.k(pt, i * n + h) * result.rigging(pt, r);
          for (std::size_t k = 0; k < n; ++k) v -= ops.gamma(pt, (k * n + i) * n + h) * df[k](pt, r);
          tangent(pt, (i * n + h) * d + r) = v;
        }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t pt = 0; pt < chart.points(); ++pt)
      for (std::size_t r = 0; r < d; ++r) {
        double v = dl[i](pt, r) + ops.m(pt, i) * result.rigging(pt, r);
        for (std::size_t k = 0; k < n; ++k) v -= ops.l(pt, k * n + i) * df[k](pt, r);
        rigging(pt, i * d + r) = v;
      }
  return make_report({{"tangent", std::move(tangent)}, {"rigging", std::move(rigging)}}, p);
}

RiggedOperators reconstruct_operators(const TensorField& f, const TensorField& rigging) {
  const GridChart& chart = f.chart();
  const std::size_t n = chart.dim();
  const std::size_t d = n + 1;
  if (f.shape() != Shape{d} || rigging.shape() != Shape{d})
    throw Error(ErrorCode::ShapeMismatch, "f and the rigging must be (n+1)-vector fields");
  if (!(rigging.chart() == chart)) throw Error(ErrorCode::ChartMismatch, "f and the rigging live on different charts");
  const TensorField df = differential(f);
  TensorField frame(chart, {d, d});
  for (std::size_t pt = 0; pt < chart.points(); ++pt)
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < n; ++c) frame(pt, r * d + c) = df(pt, r * n + c);
      frame(pt, r * d + n) = rigging(pt, r);
    }
  std::vector<TensorField> dframe;
  for (std::size_t i = 0; i < n; ++i) dframe.push_back(partial_derivative(frame, i));

  RiggedOperators ops{chart, TensorField(chart, {n, n, n}), TensorField(chart, {n, n}), TensorField(chart, {n, n}),
                      TensorField(chart, {n})};
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    const LuDecomposition lu = lu_decompose(frame.matrix_at(pt));
    if (lu.singular) throw Error(ErrorCode::SingularFrameAt, "reconstructed frame is singular", pt);
    const Matrix finv = inverse(frame.matrix_at(pt));
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix a = finv * dframe[i].matrix_at(pt);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t h = 0; h < n; ++h) ops.gamma(pt, (k * n + i) * n + h) = a(k, h);
        ops.l(pt, k * n + i) = a(k, n);
      }
      for (std::size_t h = 0; h < n; ++h) ops.k(pt, i * n + h) = -a(n, h);
      ops.m(pt, i) = -a(n, n);
    }
    // d_i d_h f is symmetric up to rounding; make the symmetries exact
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double& kij = ops.k(pt, i * n + j);
        double& kji = ops.k(pt, j * n + i);
        kij = kji = 0.5 * (kij + kji);
        for (std::size_t s = 0; s < n; ++s) {
          double& x = ops.gamma(pt, (s * n + i) * n + j);
          double& y = ops.gamma(pt, (s * n + j) * n + i);
          x = y = 0.5 * (x + y);
        }
      }
  }
  return ops;
}

RiggedOperators specialize_from_forms(const FundamentalForms& forms) {
  forms.validate();
  const GridChart& chart = forms.chart;
  const std::size_t n = chart.dim();
  TensorField ginv = inverse_metric(forms.g);
  RiggedOperators ops{chart, christoffel(forms.g), forms.k, TensorField(chart, {n, n}), TensorField(chart, {n})};
  for (std::size_t pt = 0; pt < chart.points(); ++pt)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t h = 0; h < n; ++h) acc += ginv(pt, k * n + h) * forms.k(pt, h * n + i);
        ops.l(pt, k * n + i) = forms.lambda * acc;
      }
  return ops;
}

ClassicalGcFields classical_gc_fields(const FundamentalForms& forms) {
  forms.validate();
  const GridChart& chart = forms.chart;
  const std::size_t n = chart.dim();
  const TensorField gamma = christoffel(forms.g);
  const TensorField r = riemann_from_christoffel(gamma);
  const TensorField ginv = inverse_metric(forms.g);
  std::vector<TensorField> dk;
  for (std::size_t i = 0; i < n; ++i) dk.push_back(partial_derivative(forms.k, i));
  ClassicalGcFields out{TensorField(chart, {n, n, n, n}), TensorField(chart, {n, n, n})};
  const double lambda = forms.lambda;
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    auto G = [&](std::size_t s, std::size_t a, std::size_t b) { return gamma(pt, (s * n + a) * n + b); };
    auto K = [&](std::size_t a, std::size_t b) { return forms.k(pt, a * n + b); };
    // K^k_j = g^{km} K_{mj}
    auto Ks = [&](std::size_t k, std::size_t j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n; ++m) acc += ginv(pt, k * n + m) * K(m, j);
      return acc;
    };
    auto nabla_k = [&](std::size_t i, std::size_t j, std::size_t h) {
      double v = dk[i](pt, j * n + h);
      for (std::size_t m = 0; m < n; ++m) v -= G(m, i, j) * K(m, h) + G(m, i, h) * K(j, m);
      return v;
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t h = 0; h < n; ++h) {
            const double v = r(pt, ((k * n + h) * n + i) * n + j) + lambda * (K(i, h) * Ks(k, j) - K(j, h) * Ks(k, i));
            out.gauss(pt, ((k * n + h) * n + i) * n + j) = v;
            out.gauss(pt, ((k * n + h) * n + j) * n + i) = -v;
          }
        for (std::size_t h = 0; h < n; ++h) {
          const double v = nabla_k(i, j, h) - nabla_k(j, i, h);
          out.codazzi(pt, (i * n + j) * n + h) = v;
          out.codazzi(pt, (j * n + i) * n + h) = -v;
        }
      }
  }
  return out;
}

ResidualReport classical_gc_residual(const FundamentalForms& forms, double p) {
  auto f = classical_gc_fields(forms);
  return make_report({{"gauss", std::move(f.gauss)}, {"codazzi", std::move(f.codazzi)}}, p);
}

Matrix orient_positive(Matrix f) {
  const std::size_t d = f.rows();
  if (determinant(f) < 0.0) {
    if (d % 2 == 1) {
      f *= -1.0;
    } else {
      // -F has the same determinant in even dimension; reflect a spatial axis
      for (std::size_t c = 0; c < d; ++c) f(d - 1, c) = -f(d - 1, c);
    }
  }
  return f;
}

Matrix forms_initial_frame(const FundamentalForms& forms, const MultiIndex& x_star, double epsilon) {
  forms.validate();
  if (!forms.chart.contains(x_star)) throw Error(ErrorCode::InvalidInput, "base point outside the chart");
  const std::size_t n = forms.chart.dim();
  const std::size_t d = n + 1;
  const Matrix gs = forms.g.matrix_at(forms.chart.linear(x_star));
  Matrix block(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) block(i, j) = gs(i, j);
  block(n, n) = forms.lambda;
  LorentzMatrixCert cert;
  try {
    cert = certify_lorentz(SymMatrix::from_matrix(block), epsilon);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidInput) throw;
    throw Error(ErrorCode::NotLorentzBlock, std::string("diag(g(x*), lambda) is not certifiable: ") + e.what());
  }
  return orient_positive(lorentz_decompose(cert).base_f);
}

RiggedImmersionResult immerse_hypersurface_forms(const FundamentalForms& forms, const MultiIndex& x_star,
                                                 double epsilon, const SweepOrder& sweep) {
  const Matrix f_star = forms_initial_frame(forms, x_star, epsilon);
  return immerse_hypersurface_rigged(specialize_from_forms(forms), x_star, f_star, sweep);
}

ResidualReport fundamental_form_defect(const RiggedImmersionResult& result, const FundamentalForms& forms, double p) {
  forms.validate();
  const GridChart& chart = forms.chart;
  const std::size_t n = chart.dim();
  const std::size_t d = n + 1;
  if (!(result.f.chart() == chart)) throw Error(ErrorCode::ChartMismatch, "result and forms live on different charts");
  const TensorField df = differential(result.f);
  const TensorField dl = differential(result.rigging);
  TensorField second(chart, {n, n});
  TensorField normal(chart, {});
  TensorField orth(chart, {n});
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    const Matrix a = df.matrix_at(pt);
    second.set_matrix(pt, static_cast<double>(forms.lambda) * mink_gram(a, dl.matrix_at(pt)) - forms.k.matrix_at(pt));
    const auto l = result.rigging.at(pt);
    normal(pt, 0) = mink_dot(l, l) - forms.lambda;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = -l[0] * a(0, i);
      for (std::size_t r = 1; r < d; ++r) acc += l[r] * a(r, i);
      orth(pt, i) = acc;
    }
  }
  return make_report({{"first", pullback_defect(df, forms.g)},
                      {"second", std::move(second)},
                      {"normal", std::move(normal)},
                      {"orthogonal", std::move(orth)}},
                     p);
}

}  // namespace minkembed
