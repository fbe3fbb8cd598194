#include "minkembed/alignment.hpp"

#include <algorithm>

#include "minkembed/error.hpp"

namespace minkembed {

AffineMap AffineMap::identity(std::size_t d) { return {Matrix::identity(d), Vector(d, 0.0)}; }

Vector AffineMap::apply(std::span<const double> y) const {
  Vector out = q * y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  return out;
}

TensorField AffineMap::apply(const TensorField& f) const {
  if (f.shape() != std::vector<std::size_t>{q.cols()}) throw Error(ErrorCode::ShapeMismatch, "map and field sizes differ");
  TensorField out = f;
  for (std::size_t pt = 0; pt < f.points(); ++pt) {
    const Vector y = apply(f.at(pt));
    for (std::size_t r = 0; r < y.size(); ++r) out(pt, r) = y[r];
  }
  return out;
}

TensorField AffineMap::apply_linear(const TensorField& f) const {
  if (f.shape() != std::vector<std::size_t>{q.cols()}) throw Error(ErrorCode::ShapeMismatch, "map and field sizes differ");
  TensorField out = f;
  for (std::size_t pt = 0; pt < f.points(); ++pt) {
    const Vector y = q * f.at(pt);
    for (std::size_t r = 0; r < y.size(); ++r) out(pt, r) = y[r];
  }
  return out;
}

AffineMap AffineMap::inverse() const {
  Matrix qi = minkembed::inverse(q);
  Vector vi = qi * v;
  for (auto& x : vi) x = -x;
  return {std::move(qi), std::move(vi)};
}

AffineMap AffineMap::compose(const AffineMap& other) const {
  Vector w = q * other.v;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += v[i];
  return {q * other.q, std::move(w)};
}

double sobolev_gap(const TensorField& f1, const TensorField& f2, int order, double p) {
  return sobolev_norm(difference(f1, f2), order, p);
}

namespace {

void same_chart(const GridChart& a, const GridChart& b) {
  if (!(a == b)) throw Error(ErrorCode::ChartMismatch, "inputs live on different charts");
}

// pi = F df(x*)^{-1}, pinned so that pi(f(x*)) = 0.
AffineMap base_map(const Matrix& target, const Matrix& frame, std::span<const double> f_star) {
  const Matrix q = target * inverse(frame);
  Vector v = q * f_star;
  for (auto& x : v) x = -x;
  return {q, std::move(v)};
}

// Lemma-style frames of two base matrices, both anchored at their midpoint.
std::pair<Matrix, Matrix> anchored_pair(const Matrix& g1, const Matrix& g2, double epsilon) {
  const Matrix mid = 0.5 * (g1 + g2);
  const DecompAnchor anchor = lorentz_decompose(certify_lorentz(SymMatrix::from_matrix(mid), epsilon));
  return {lorentz_decompose_anchored(anchor, certify_lorentz(SymMatrix::from_matrix(g1), epsilon)),
          lorentz_decompose_anchored(anchor, certify_lorentz(SymMatrix::from_matrix(g2), epsilon))};
}

std::optional<MinkIsometry> as_isometry(const AffineMap& m) {
  if (!is_mink_orthogonal(m.q, 1e-10).orthogonal) return std::nullopt;
  return MinkIsometry::make(m.q, m.v);
}

Matrix forms_block(const FundamentalForms& forms, std::size_t pt) {
  const std::size_t n = forms.chart.dim();
  const Matrix gs = forms.g.matrix_at(pt);
  Matrix block(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) block(i, j) = gs(i, j);
  block(n, n) = forms.lambda;
  return block;
}

}  // namespace

AlignmentResult align_manifold(const ImmersionResult& r1, const ImmersionResult& r2, const TensorField& g1,
                               const TensorField& g2, double p, double epsilon) {
  const GridChart& chart = r1.f.chart();
  same_chart(chart, r2.f.chart());
  same_chart(chart, g1.chart());
  same_chart(chart, g2.chart());
  const std::size_t star = chart.linear(r1.base_point);
  const auto [fa, fb] = anchored_pair(g1.matrix_at(star), g2.matrix_at(star), epsilon);
  AlignmentResult out;
  out.first = base_map(fa, r1.frame.matrix_at(star), r1.f.at(star));
  out.second = base_map(fb, r2.frame.matrix_at(star), r2.f.at(star));
  out.map = out.second.inverse().compose(out.first);
  out.isometry = as_isometry(out.map);
  const TensorField a = out.first.apply(r1.f);
  const TensorField b = out.second.apply(r2.f);
  out.aligned_gap_w2p = sobolev_gap(b, a, 2, p);
  out.aligned_gap_max = max_norm(difference(b, a));
  out.input_gap = sobolev_gap(g2, g1, 1, p);
  return out;
}

AlignmentResult align_hypersurface(const RiggedImmersionResult& r1, const RiggedImmersionResult& r2,
                                   const RiggedOperators& ops1, const RiggedOperators& ops2, double p) {
  const GridChart& chart = r1.f.chart();
  same_chart(chart, r2.f.chart());
  same_chart(chart, ops1.chart);
  same_chart(chart, ops2.chart);
  const std::size_t star = chart.linear(r1.base_point);
  AlignmentResult out;
  const Matrix q = r2.frame.matrix_at(star) * inverse(r1.frame.matrix_at(star));
  Vector v = q * r1.f.at(star);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = r2.f(star, i) - v[i];
  out.map = {q, std::move(v)};
  out.first = out.map;
  out.second = AffineMap::identity(q.rows());
  out.isometry = as_isometry(out.map);
  const TensorField a = out.map.apply(r1.f);
  out.aligned_gap_w2p = sobolev_gap(r2.f, a, 2, p) + sobolev_gap(r2.rigging, out.map.apply_linear(r1.rigging), 1, p);
  out.aligned_gap_max = max_norm(difference(r2.f, a));
  out.input_gap = sobolev_gap(ops2.gamma, ops1.gamma, 0, p) + sobolev_gap(ops2.k, ops1.k, 0, p) +
                  sobolev_gap(ops2.l, ops1.l, 0, p) + sobolev_gap(ops2.m, ops1.m, 0, p);
  return out;
}

AlignmentResult align_hypersurface(const RiggedImmersionResult& r1, const RiggedImmersionResult& r2,
                                   const FundamentalForms& forms1, const FundamentalForms& forms2, double p,
                                   double epsilon, bool proper_required) {
  const GridChart& chart = r1.f.chart();
  same_chart(chart, r2.f.chart());
  same_chart(chart, forms1.chart);
  same_chart(chart, forms2.chart);
  const std::size_t star = chart.linear(r1.base_point);
  auto [fa, fb] = anchored_pair(forms_block(forms1, star), forms_block(forms2, star), epsilon);
  AlignmentResult out;
  out.first = base_map(orient_positive(std::move(fa)), r1.frame.matrix_at(star), r1.f.at(star));
  out.second = base_map(orient_positive(std::move(fb)), r2.frame.matrix_at(star), r2.f.at(star));
  if (proper_required)
    for (const AffineMap* m : {&out.first, &out.second})
      if (determinant(m->q) < 0.0)
        throw Error(ErrorCode::NotProper, "base-point map reverses orientation (det Q < 0)");
  out.map = out.second.inverse().compose(out.first);
  out.isometry = as_isometry(out.map);
  const TensorField a = out.first.apply(r1.f);
  const TensorField b = out.second.apply(r2.f);
  out.aligned_gap_w2p = sobolev_gap(b, a, 2, p) +
                        sobolev_gap(out.second.apply_linear(r2.rigging), out.first.apply_linear(r1.rigging), 1, p);
  out.aligned_gap_max = max_norm(difference(b, a));
  out.input_gap = sobolev_gap(forms2.g, forms1.g, 1, p) + sobolev_gap(forms2.k, forms1.k, 0, p);
  return out;
}

}  // namespace minkembed
