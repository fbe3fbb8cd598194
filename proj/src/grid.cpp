#include "minkembed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minkembed/error.hpp"

namespace minkembed {

double Axis::coord(std::size_t i) const noexcept {
  if (i + 1 == samples) return max;
  return min + static_cast<double>(i) * spacing();
}

GridChart::GridChart(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error(ErrorCode::InvalidInput, "chart needs at least one axis");
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const Axis& ax = axes_[a];
    if (!std::isfinite(ax.min) || !std::isfinite(ax.max) || !(ax.min < ax.max)) {
      std::ostringstream msg;
      msg << "axis " << a << ": need finite min < max";
      throw Error(ErrorCode::InvalidInput, msg.str());
    }
    if (ax.samples < 4) {
      std::ostringstream msg;
      msg << "axis " << a << ": need at least 4 samples, got " << ax.samples;
      throw Error(ErrorCode::InvalidInput, msg.str());
    }
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t a = axes_.size() - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axes_[a].samples;
  points_ = strides_[0] * axes_[0].samples;
}

GridChart GridChart::uniform(std::size_t dim, double min, double max, std::size_t samples) {
  return GridChart(std::vector<Axis>(dim, Axis{min, max, samples}));
}

double GridChart::volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.max - ax.min;
  return v;
}

std::size_t GridChart::linear(const MultiIndex& idx) const {
  if (!contains(idx)) throw Error(ErrorCode::InvalidInput, "multi-index outside the chart");
  std::size_t lin = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) lin += idx[a] * strides_[a];
  return lin;
}

MultiIndex GridChart::multi(std::size_t linear) const {
  MultiIndex idx(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) idx[a] = (linear / strides_[a]) % axes_[a].samples;
  return idx;
}

Vector GridChart::coords(std::size_t linear) const {
  Vector x(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) x[a] = axes_[a].coord((linear / strides_[a]) % axes_[a].samples);
  return x;
}

bool GridChart::contains(const MultiIndex& idx) const {
  if (idx.size() != axes_.size()) return false;
  for (std::size_t a = 0; a < axes_.size(); ++a)
    if (idx[a] >= axes_[a].samples) return false;
  return true;
}

MultiIndex GridChart::center() const {
  MultiIndex idx(axes_.size());
  for (std::size_t a = 0; a < axes_.size(); ++a) idx[a] = axes_[a].samples / 2;
  return idx;
}

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

// All component offsets (i, j) swapped by a symmetry over `shape`.
std::vector<std::pair<std::size_t, std::size_t>> symmetric_offsets(const std::vector<std::size_t>& shape,
                                                                   const SymmetryPair& sym) {
  const std::size_t rank = shape.size();
  if (sym.first >= rank || sym.second >= rank || shape[sym.first] != shape[sym.second])
    throw Error(ErrorCode::InvalidInput, "symmetry refers to incompatible indices");
  std::vector<std::size_t> strides(rank, 1);
  for (std::size_t k = rank; k-- > 1;) strides[k - 1] = strides[k] * shape[k];
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = product(shape);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t i = (c / strides[sym.first]) % shape[sym.first];
    const std::size_t j = (c / strides[sym.second]) % shape[sym.second];
    if (i >= j) continue;
    const std::size_t partner = c - i * strides[sym.first] - j * strides[sym.second] + j * strides[sym.first] +
                                i * strides[sym.second];
    out.emplace_back(c, partner);
  }
  return out;
}

}  // namespace

TensorField::TensorField(GridChart chart, std::vector<std::size_t> shape)
    : chart_(std::move(chart)), shape_(std::move(shape)), comps_(product(shape_)),
      data_(chart_.points() * comps_, 0.0) {}

TensorField::TensorField(GridChart chart, std::vector<std::size_t> shape, std::vector<double> data,
                         std::vector<SymmetryPair> symmetries)
    : chart_(std::move(chart)), shape_(std::move(shape)), comps_(product(shape_)), data_(std::move(data)) {
  if (data_.size() != chart_.points() * comps_) {
    std::ostringstream msg;
    msg << "field data has " << data_.size() << " samples, expected " << chart_.points() * comps_;
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  for (std::size_t k = 0; k < data_.size(); ++k)
    if (!std::isfinite(data_[k])) throw Error(ErrorCode::InvalidInput, "non-finite field sample", k / comps_);
  for (const auto& sym : symmetries) {
    for (auto [c, partner] : symmetric_offsets(shape_, sym)) {
      for (std::size_t pt = 0; pt < chart_.points(); ++pt) {
        double& x = data_[pt * comps_ + c];
        double& y = data_[pt * comps_ + partner];
        if (std::abs(x - y) > 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}))
          throw Error(ErrorCode::InvalidInput, "declared symmetry violated", pt);
        x = y = 0.5 * (x + y);
      }
    }
  }
}

Matrix TensorField::matrix_at(std::size_t point) const {
  if (shape_.size() != 2) throw Error(ErrorCode::ShapeMismatch, "matrix_at needs a rank-2 field");
  Matrix m(shape_[0], shape_[1]);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(point * comps_), comps_, m.data().begin());
  return m;
}

void TensorField::set_matrix(std::size_t point, const Matrix& m) {
  if (shape_.size() != 2 || m.rows() != shape_[0] || m.cols() != shape_[1])
    throw Error(ErrorCode::ShapeMismatch, "set_matrix shape mismatch");
  std::copy(m.data().begin(), m.data().end(), data_.begin() + static_cast<std::ptrdiff_t>(point * comps_));
}

bool TensorField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

TensorField difference(const TensorField& f, const TensorField& g) {
  if (!(f.chart() == g.chart())) throw Error(ErrorCode::ChartMismatch, "fields live on different charts");
  if (f.shape() != g.shape()) throw Error(ErrorCode::ShapeMismatch, "fields have different shapes");
  TensorField out = f;
  auto& d = out.data();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= g.data()[k];
  return out;
}

namespace {

// Boundary stencil: the central difference with the ghost value f(-1)
// extrapolated by the polynomial through the first `points` samples. Its
// error expansion agrees with the central one up to h^{points-2}, so the
// discretisation error stays a smooth function of position and derivatives
// of derivatives remain second order. Written on forward differences
// d_k = f_{k+1} - f_k so constants give exactly zero.
double one_sided(const double* d, std::size_t points) {
  switch (points) {
    case 4:
      return 2.0 * d[0] - 1.5 * d[1] + 0.5 * d[2];
    case 5:
      return 2.5 * d[0] - 3.0 * d[1] + 2.0 * d[2] - 0.5 * d[3];
    default:
      return 3.0 * d[0] - 5.0 * d[1] + 5.0 * d[2] - 2.5 * d[3] + 0.5 * d[4];
  }
}

}  // namespace

TensorField partial_derivative(const TensorField& f, std::size_t axis) {
  const GridChart& chart = f.chart();
  if (axis >= chart.dim()) {
    std::ostringstream msg;
    msg << "axis " << axis << " out of range for a " << chart.dim() << "-dimensional chart";
    throw Error(ErrorCode::AxisOutOfRange, msg.str());
  }
  const std::size_t n = chart.axis(axis).samples;
  const std::size_t stride = chart.stride(axis);
  const std::size_t nc = f.components();
  const double inv_h = 1.0 / chart.spacing(axis);
  const std::size_t points = std::min<std::size_t>(n, 6);
  TensorField out(chart, f.shape());
  const auto& in = f.data();
  auto& res = out.data();
  for (std::size_t pt = 0; pt < chart.points(); ++pt) {
    const std::size_t i = (pt / stride) % n;
    for (std::size_t c = 0; c < nc; ++c) {
      auto v = [&](std::ptrdiff_t k) {
        return in[(pt + static_cast<std::size_t>(k * static_cast<std::ptrdiff_t>(stride))) * nc + c];
      };
      double d;
      if (i == 0 || i + 1 == n) {
        const std::ptrdiff_t dir = i == 0 ? 1 : -1;
        double diffs[5];
        for (std::size_t k = 0; k + 1 < points; ++k) {
          const auto kk = static_cast<std::ptrdiff_t>(k);
          diffs[k] = v(dir * (kk + 1)) - v(dir * kk);
        }
        d = static_cast<double>(dir) * one_sided(diffs, points);
      } else {
        d = 0.5 * (v(1) - v(-1));
      }
      res[pt * nc + c] = d * inv_h;
    }
  }
  return out;
}

namespace {

Vector magnitudes(const TensorField& f) {
  Vector m(f.points(), 0.0);
  const std::size_t nc = f.components();
  for (std::size_t pt = 0; pt < f.points(); ++pt) {
    double mx = 0.0;
    for (std::size_t c = 0; c < nc; ++c) mx = std::max(mx, std::abs(f(pt, c)));
    m[pt] = mx;
  }
  return m;
}

double lp_of_magnitudes(const GridChart& chart, const Vector& mag, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidInput, "Lebesgue exponent must be >= 1");
  const double scale = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (p == kInfinity || scale == 0.0) return scale;
  double cell = 1.0;
  for (std::size_t a = 0; a < chart.dim(); ++a) cell *= chart.spacing(a);
  double sum = 0.0;
  for (std::size_t pt = 0; pt < mag.size(); ++pt) {
    double w = cell;
    for (std::size_t a = 0; a < chart.dim(); ++a) {
      const std::size_t i = (pt / chart.stride(a)) % chart.axis(a).samples;
      if (i == 0 || i + 1 == chart.axis(a).samples) w *= 0.5;
    }
    sum += w * std::pow(mag[pt] / scale, p);
  }
  return scale * std::pow(sum, 1.0 / p);
}

}  // namespace

double max_norm(const TensorField& f) {
  const Vector m = magnitudes(f);
  return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

double lp_norm(const TensorField& f, double p) { return lp_of_magnitudes(f.chart(), magnitudes(f), p); }

double sobolev_norm(const TensorField& f, int order, double p) {
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidInput, "Sobolev order must be 0, 1 or 2");
  double total = lp_norm(f, p);
  if (order == 0) return total;
  const std::size_t m = f.chart().dim();
  for (std::size_t a = 0; a < m; ++a) {
    const TensorField da = partial_derivative(f, a);
    total += lp_norm(da, p);
    if (order == 2)
      for (std::size_t b = a; b < m; ++b) total += lp_norm(partial_derivative(da, b), p);
  }
  return total;
}

ResidualReport make_report(const std::vector<std::pair<std::string, TensorField>>& parts, double p) {
  if (parts.empty()) throw Error(ErrorCode::InvalidInput, "empty residual report");
  const GridChart& chart = parts.front().second.chart();
  ResidualReport r;
  r.p = p;
  r.grid = chart;
  Vector combined(chart.points(), 0.0);
  for (const auto& [label, field] : parts) {
    if (!(field.chart() == chart)) throw Error(ErrorCode::ChartMismatch, "residual parts on different charts");
    const Vector m = magnitudes(field);
    for (std::size_t pt = 0; pt < m.size(); ++pt) combined[pt] = std::max(combined[pt], m[pt]);
    SubResidual s{label, m.empty() ? 0.0 : *std::max_element(m.begin(), m.end()), lp_of_magnitudes(chart, m, p)};
    r.per_equation.push_back(std::move(s));
  }
  r.max_abs = *std::max_element(combined.begin(), combined.end());
  r.lp_norm = lp_of_magnitudes(chart, combined, p);
  return r;
}

TensorField inverse_metric(const TensorField& g, double det_floor) {
  if (g.shape().size() != 2 || g.shape()[0] != g.shape()[1])
    throw Error(ErrorCode::ShapeMismatch, "metric must have shape [d,d]");
  const std::size_t d = g.shape()[0];
  TensorField out(g.chart(), g.shape());
  double worst = kInfinity;
  std::size_t worst_pt = 0;
  for (std::size_t pt = 0; pt < g.points(); ++pt) {
    const Matrix m = g.matrix_at(pt);
    const double det = std::abs(determinant(m));
    if (det < worst) {
      worst = det;
      worst_pt = pt;
    }
    if (det < det_floor) continue;
    Matrix inv = inverse(m);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
    out.set_matrix(pt, inv);
  }
  if (worst < det_floor) {
    std::ostringstream msg;
    msg << "|det g| = " << worst << " below floor " << det_floor;
    throw Error(ErrorCode::SingularMetricAt, msg.str(), worst_pt);
  }
  return out;
}

TensorField christoffel(const TensorField& g, double det_floor) {
  const TensorField ginv = inverse_metric(g, det_floor);
  const std::size_t d = g.shape()[0];
  if (g.chart().dim() != d) throw Error(ErrorCode::ShapeMismatch, "metric size must equal the chart dimension");
  std::vector<TensorField> dg;
  for (std::size_t a = 0; a < d; ++a) dg.push_back(partial_derivative(g, a));
  TensorField gamma(g.chart(), {d, d, d});
  Vector lower(d);
  for (std::size_t pt = 0; pt < g.points(); ++pt) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) {
        // lower[n] = 1/2 (d_a g_{bn} + d_b g_{an} - d_n g_{ab})
        for (std::size_t n = 0; n < d; ++n)
          lower[n] = 0.5 * (dg[a](pt, b * d + n) + dg[b](pt, a * d + n) - dg[n](pt, a * d + b));
        for (std::size_t s = 0; s < d; ++s) {
          double acc = 0.0;
          for (std::size_t n = 0; n < d; ++n) acc += ginv(pt, s * d + n) * lower[n];
          gamma(pt, (s * d + a) * d + b) = acc;
          gamma(pt, (s * d + b) * d + a) = acc;
        }
      }
  }
  return gamma;
}

TensorField riemann_from_christoffel(const TensorField& gamma) {
  const auto& sh = gamma.shape();
  if (sh.size() != 3 || sh[0] != sh[1] || sh[1] != sh[2])
    throw Error(ErrorCode::ShapeMismatch, "Christoffel field must have shape [d,d,d]");
  const std::size_t d = sh[0];
  if (gamma.chart().dim() != d) throw Error(ErrorCode::ShapeMismatch, "Christoffel size must equal the chart dimension");
  std::vector<TensorField> dG;
  for (std::size_t a = 0; a < d; ++a) dG.push_back(partial_derivative(gamma, a));
  auto G = [&](std::size_t pt, std::size_t s, std::size_t a, std::size_t b) { return gamma(pt, (s * d + a) * d + b); };
  TensorField r(gamma.chart(), {d, d, d, d});
  for (std::size_t pt = 0; pt < gamma.points(); ++pt)
    for (std::size_t t = 0; t < d; ++t)
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = a + 1; b < d; ++b) {
            double v = dG[a](pt, (t * d + b) * d + s) - dG[b](pt, (t * d + a) * d + s);
            for (std::size_t n = 0; n < d; ++n) v += G(pt, n, b, s) * G(pt, t, a, n) - G(pt, n, a, s) * G(pt, t, b, n);
            r(pt, ((t * d + s) * d + a) * d + b) = v;
            r(pt, ((t * d + s) * d + b) * d + a) = -v;
          }
  return r;
}

TensorField riemann(const TensorField& g, double det_floor) {
  return riemann_from_christoffel(christoffel(g, det_floor));
}

ResidualReport flatness_residual(const TensorField& g, double p, double det_floor) {
  const TensorField r = riemann(g, det_floor);
  const std::size_t d = g.shape()[0];
  std::vector<std::pair<std::string, TensorField>> parts;
  for (std::size_t t = 0; t < d; ++t)
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
          TensorField comp(g.chart(), {});
          for (std::size_t pt = 0; pt < g.points(); ++pt) comp(pt, 0) = r(pt, ((t * d + s) * d + a) * d + b);
          std::ostringstream label;
          label << "R^" << t << "_" << s << a << b;
          parts.emplace_back(label.str(), std::move(comp));
        }
  if (parts.empty()) {
    // one-dimensional charts carry no curvature
    parts.emplace_back("R", TensorField(g.chart(), {}));
  }
  return make_report(parts, p);
}

}  // namespace minkembed
