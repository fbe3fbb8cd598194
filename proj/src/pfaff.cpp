#include "minkembed/pfaff.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "minkembed/error.hpp"

namespace minkembed {

namespace {

void check_field(const TensorField& f, const GridChart& chart, std::size_t rows, std::size_t cols,
                 const char* what) {
  if (!(f.chart() == chart)) throw Error(ErrorCode::ChartMismatch, std::string(what) + " lives on another chart");
  if (f.shape() != std::vector<std::size_t>{rows, cols}) {
    std::ostringstream msg;
    msg << what << " must have shape [" << rows << "," << cols << "]";
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

}  // namespace

void PfaffCoeffs::validate() const {
  const std::size_t m = chart.dim();
  if (q == 0 || l == 0) throw Error(ErrorCode::ShapeMismatch, "Pfaff system needs q, l >= 1");
  if (a.size() != m) throw Error(ErrorCode::ShapeMismatch, "need one A field per axis");
  if (!b.empty() && b.size() != m) throw Error(ErrorCode::ShapeMismatch, "need one B field per axis or none");
  if (!c.empty() && c.size() != m) throw Error(ErrorCode::ShapeMismatch, "need one C field per axis or none");
  for (const auto& f : a) check_field(f, chart, l, l, "A");
  for (const auto& f : b) check_field(f, chart, q, q, "B");
  for (const auto& f : c) check_field(f, chart, q, l, "C");
}

PfaffCoeffs PfaffCoeffs::from_christoffel(const TensorField& gamma) {
  const auto& sh = gamma.shape();
  if (sh.size() != 3 || sh[0] != sh[1] || sh[1] != sh[2] || sh[0] != gamma.chart().dim())
    throw Error(ErrorCode::ShapeMismatch, "Christoffel field must have shape [d,d,d] on a d-dimensional chart");
  const std::size_t d = sh[0];
  PfaffCoeffs out{gamma.chart(), d, d, {}, {}, {}};
  for (std::size_t al = 0; al < d; ++al) {
    TensorField f(gamma.chart(), {d, d});
    for (std::size_t pt = 0; pt < gamma.points(); ++pt)
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t be = 0; be < d; ++be) f(pt, s * d + be) = gamma(pt, (s * d + al) * d + be);
    out.a.push_back(std::move(f));
  }
  return out;
}

PfaffCoeffs PfaffCoeffs::poincare(const TensorField& f) {
  const auto& sh = f.shape();
  const std::size_t m = f.chart().dim();
  if (sh.size() != 2 || sh[1] != m) throw Error(ErrorCode::ShapeMismatch, "frame field must have shape [d, m]");
  const std::size_t d = sh[0];
  PfaffCoeffs out{f.chart(), d, 1, {}, {}, {}};
  for (std::size_t al = 0; al < m; ++al) {
    out.a.emplace_back(f.chart(), std::vector<std::size_t>{1, 1});
    TensorField col(f.chart(), {d, 1});
    for (std::size_t pt = 0; pt < f.points(); ++pt)
      for (std::size_t r = 0; r < d; ++r) col(pt, r) = f(pt, r * m + al);
    out.c.push_back(std::move(col));
  }
  return out;
}

namespace {

// RK4 stepping of a single Pfaff system along grid lines. Works on raw
// row-major buffers to keep the inner loops allocation free.
class Stepper {
 public:
  explicit Stepper(const PfaffCoeffs& c)
      : c_(c), q_(c.q), l_(c.l), n_(c.q * c.l), k1_(n_), k2_(n_), k3_(n_), k4_(n_), tmp_(n_),
        amid_(c.l * c.l), bmid_(c.q * c.q), cmid_(n_) {}

  // y <- y advanced from pt_from to the neighbour pt_to along `axis`.
  void step(std::vector<double>& y, std::size_t axis, std::size_t pt_from, std::size_t pt_to, double h) {
    const double* a0 = coef(c_.a, axis, pt_from, l_ * l_);
    const double* a1 = coef(c_.a, axis, pt_to, l_ * l_);
    const double* b0 = c_.b.empty() ? nullptr : coef(c_.b, axis, pt_from, q_ * q_);
    const double* b1 = c_.b.empty() ? nullptr : coef(c_.b, axis, pt_to, q_ * q_);
    const double* c0 = c_.c.empty() ? nullptr : coef(c_.c, axis, pt_from, n_);
    const double* c1 = c_.c.empty() ? nullptr : coef(c_.c, axis, pt_to, n_);
    average(a0, a1, amid_);
    if (b0) average(b0, b1, bmid_);
    if (c0) average(c0, c1, cmid_);
    const double* am = amid_.data();
    const double* bm = b0 ? bmid_.data() : nullptr;
    const double* cm = c0 ? cmid_.data() : nullptr;

    rhs(y.data(), a0, b0, c0, k1_);
    axpy(y, 0.5 * h, k1_, tmp_);
    rhs(tmp_.data(), am, bm, cm, k2_);
    axpy(y, 0.5 * h, k2_, tmp_);
    rhs(tmp_.data(), am, bm, cm, k3_);
    axpy(y, h, k3_, tmp_);
    rhs(tmp_.data(), a1, b1, c1, k4_);
    for (std::size_t k = 0; k < n_; ++k) y[k] += h / 6.0 * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
    for (double v : y)
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteState, "Pfaff integration overflowed", pt_to);
  }

 private:
  static const double* coef(const std::vector<TensorField>& f, std::size_t axis, std::size_t pt, std::size_t n) {
    return f[axis].data().data() + pt * n;
  }
  static void average(const double* x, const double* y, std::vector<double>& out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (x[k] + y[k]);
  }
  void axpy(const std::vector<double>& y, double s, const std::vector<double>& k, std::vector<double>& out) const {
    for (std::size_t i = 0; i < n_; ++i) out[i] = y[i] + s * k[i];
  }
  // out = Y A + B Y + C
  void rhs(const double* y, const double* a, const double* b, const double* c, std::vector<double>& out) const {
    for (std::size_t i = 0; i < q_; ++i)
      for (std::size_t j = 0; j < l_; ++j) {
        double acc = c ? c[i * l_ + j] : 0.0;
        for (std::size_t k = 0; k < l_; ++k) acc += y[i * l_ + k] * a[k * l_ + j];
        if (b)
          for (std::size_t k = 0; k < q_; ++k) acc += b[i * q_ + k] * y[k * l_ + j];
        out[i * l_ + j] = acc;
      }
  }

  const PfaffCoeffs& c_;
  std::size_t q_, l_, n_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, amid_, bmid_, cmid_;
};

SweepOrder resolve_sweep(const SweepOrder& sweep, std::size_t m) {
  if (sweep.empty()) {
    SweepOrder s(m);
    std::iota(s.begin(), s.end(), 0);
    return s;
  }
  std::vector<bool> seen(m, false);
  if (sweep.size() != m) throw Error(ErrorCode::InvalidInput, "sweep order must list every axis once");
  for (auto a : sweep) {
    if (a >= m || seen[a]) throw Error(ErrorCode::InvalidInput, "sweep order must list every axis once");
    seen[a] = true;
  }
  return sweep;
}

}  // namespace

TensorField pfaff_integrate(const PfaffCoeffs& coeffs, const MultiIndex& x0, const Matrix& y0,
                            const SweepOrder& sweep) {
  coeffs.validate();
  const GridChart& chart = coeffs.chart;
  if (!chart.contains(x0)) throw Error(ErrorCode::InvalidInput, "initial point outside the chart");
  if (y0.rows() != coeffs.q || y0.cols() != coeffs.l)
    throw Error(ErrorCode::ShapeMismatch, "initial value has the wrong shape");
  if (!all_finite(y0)) throw Error(ErrorCode::InvalidInput, "initial value is not finite");
  const std::size_t m = chart.dim();
  const SweepOrder order = resolve_sweep(sweep, m);
  const std::size_t n = coeffs.q * coeffs.l;

  TensorField y(chart, {coeffs.q, coeffs.l});
  auto& data = y.data();
  const std::size_t start = chart.linear(x0);
  std::copy(y0.data().begin(), y0.data().end(), data.begin() + static_cast<std::ptrdiff_t>(start * n));

  Stepper stepper(coeffs);
  std::vector<double> state(n);
  for (std::size_t stage = 0; stage < m; ++stage) {
    const std::size_t axis = order[stage];
    const std::size_t stride = chart.stride(axis);
    const std::size_t samples = chart.axis(axis).samples;
    const double h = chart.spacing(axis);
    for (std::size_t pt = 0; pt < chart.points(); ++pt) {
      // seeds: points already filled, i.e. matching x0 on this and all later axes
      bool seed = true;
      for (std::size_t later = stage; later < m && seed; ++later) {
        const std::size_t ax = order[later];
        seed = (pt / chart.stride(ax)) % chart.axis(ax).samples == x0[ax];
      }
      if (!seed) continue;
      const std::size_t i0 = x0[axis];
      for (int dir : {1, -1}) {
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pt * n), n, state.begin());
        std::size_t cur = pt;
        for (std::size_t i = i0; dir > 0 ? i + 1 < samples : i > 0; i = dir > 0 ? i + 1 : i - 1) {
          const std::size_t next = dir > 0 ? cur + stride : cur - stride;
          stepper.step(state, axis, cur, next, dir * h);
          std::copy(state.begin(), state.end(), data.begin() + static_cast<std::ptrdiff_t>(next * n));
          cur = next;
        }
      }
    }
  }
  return y;
}

MultiIndex StaircasePath::end(const GridChart& chart) const {
  if (!chart.contains(start)) throw Error(ErrorCode::PathOutOfChart, "path starts outside the chart");
  MultiIndex idx = start;
  for (const auto& mv : moves) {
    if (mv.axis >= chart.dim()) throw Error(ErrorCode::PathOutOfChart, "path move along a missing axis");
    if (mv.direction != 1 && mv.direction != -1) throw Error(ErrorCode::InvalidInput, "move direction must be +1 or -1");
    if (mv.direction > 0) {
      if (idx[mv.axis] + mv.steps >= chart.axis(mv.axis).samples)
        throw Error(ErrorCode::PathOutOfChart, "path leaves the chart");
      idx[mv.axis] += mv.steps;
    } else {
      if (mv.steps > idx[mv.axis]) throw Error(ErrorCode::PathOutOfChart, "path leaves the chart");
      idx[mv.axis] -= mv.steps;
    }
  }
  return idx;
}

Matrix pfaff_integrate_path(const PfaffCoeffs& coeffs, const StaircasePath& path, const Matrix& y0) {
  coeffs.validate();
  const GridChart& chart = coeffs.chart;
  path.end(chart);
  if (y0.rows() != coeffs.q || y0.cols() != coeffs.l)
    throw Error(ErrorCode::ShapeMismatch, "initial value has the wrong shape");
  Stepper stepper(coeffs);
  std::vector<double> state(y0.data().begin(), y0.data().end());
  std::size_t cur = chart.linear(path.start);
  for (const auto& mv : path.moves) {
    const std::size_t stride = chart.stride(mv.axis);
    const double h = chart.spacing(mv.axis) * mv.direction;
    for (std::size_t s = 0; s < mv.steps; ++s) {
      const std::size_t next = mv.direction > 0 ? cur + stride : cur - stride;
      stepper.step(state, mv.axis, cur, next, h);
      cur = next;
    }
  }
  Matrix out(coeffs.q, coeffs.l);
  std::copy(state.begin(), state.end(), out.data().begin());
  return out;
}

namespace {

// Pointwise product of two matrix fields: out = x * y.
void mul_add(const TensorField& x, const TensorField& y, double s, TensorField& out) {
  const std::size_t r = x.shape()[0], k = x.shape()[1], c = y.shape()[1];
  for (std::size_t pt = 0; pt < out.points(); ++pt)
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        double acc = 0.0;
        for (std::size_t t = 0; t < k; ++t) acc += x(pt, i * k + t) * y(pt, t * c + j);
        out(pt, i * c + j) += s * acc;
      }
}

std::string pair_label(const char* name, std::size_t a, std::size_t b) {
  std::ostringstream s;
  s << name << "[" << a << b << "]";
  return s.str();
}

}  // namespace

std::vector<std::pair<std::string, TensorField>> pfaff_compatibility_fields(const PfaffCoeffs& coeffs) {
  coeffs.validate();
  const std::size_t m = coeffs.chart.dim();
  auto derivs = [&](const std::vector<TensorField>& fs) {
    std::vector<std::vector<TensorField>> d(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t ax = 0; ax < m; ++ax) d[i].push_back(partial_derivative(fs[i], ax));
    return d;
  };
  const auto da = derivs(coeffs.a);
  const auto db = derivs(coeffs.b);
  const auto dc = derivs(coeffs.c);

  std::vector<std::pair<std::string, TensorField>> parts;
  for (std::size_t al = 0; al < m; ++al)
    for (std::size_t be = al + 1; be < m; ++be) {
      TensorField za = difference(da[be][al], da[al][be]);
      mul_add(coeffs.a[be], coeffs.a[al], -1.0, za);
      mul_add(coeffs.a[al], coeffs.a[be], 1.0, za);
      parts.emplace_back(pair_label("A", al, be), std::move(za));
      if (!coeffs.b.empty()) {
        TensorField zb = difference(db[be][al], db[al][be]);
        mul_add(coeffs.b[al], coeffs.b[be], -1.0, zb);
        mul_add(coeffs.b[be], coeffs.b[al], 1.0, zb);
        parts.emplace_back(pair_label("B", al, be), std::move(zb));
      }
      if (!coeffs.c.empty()) {
        TensorField zc = difference(dc[be][al], dc[al][be]);
        mul_add(coeffs.c[be], coeffs.a[al], -1.0, zc);
        mul_add(coeffs.c[al], coeffs.a[be], 1.0, zc);
        if (!coeffs.b.empty()) {
          mul_add(coeffs.b[al], coeffs.c[be], -1.0, zc);
          mul_add(coeffs.b[be], coeffs.c[al], 1.0, zc);
        }
        parts.emplace_back(pair_label("C", al, be), std::move(zc));
      }
    }
  return parts;
}

ResidualReport pfaff_compatibility_residual(const PfaffCoeffs& coeffs, double p) {
  auto parts = pfaff_compatibility_fields(coeffs);
  if (parts.empty()) parts.emplace_back("A", TensorField(coeffs.chart, {}));
  return make_report(parts, p);
}

ResidualReport poincare_compatibility_residual(const TensorField& f, double p) {
  const auto& sh = f.shape();
  const std::size_t m = f.chart().dim();
  if (sh.size() != 2 || sh[1] != m) throw Error(ErrorCode::ShapeMismatch, "frame field must have shape [d, m]");
  const std::size_t d = sh[0];
  std::vector<TensorField> df;
  for (std::size_t ax = 0; ax < m; ++ax) df.push_back(partial_derivative(f, ax));
  std::vector<std::pair<std::string, TensorField>> parts;
  for (std::size_t al = 0; al < m; ++al)
    for (std::size_t be = al + 1; be < m; ++be) {
      TensorField curl(f.chart(), {d});
      for (std::size_t pt = 0; pt < f.points(); ++pt)
        for (std::size_t r = 0; r < d; ++r) curl(pt, r) = df[al](pt, r * m + be) - df[be](pt, r * m + al);
      parts.emplace_back(pair_label("curl", al, be), std::move(curl));
    }
  if (parts.empty()) parts.emplace_back("curl", TensorField(f.chart(), {}));
  return make_report(parts, p);
}

TensorField poincare_integrate(const TensorField& f, const MultiIndex& x0, const Vector& f0, const SweepOrder& sweep) {
  const PfaffCoeffs coeffs = PfaffCoeffs::poincare(f);
  if (f0.size() != coeffs.q) throw Error(ErrorCode::ShapeMismatch, "initial point has the wrong dimension");
  Matrix y0(coeffs.q, 1);
  y0.set_column(0, f0);
  TensorField col = pfaff_integrate(coeffs, x0, y0, sweep);
  return TensorField(f.chart(), {coeffs.q}, std::move(col.data()));
}

DependenceGap pfaff_dependence_gap(const PfaffCoeffs& c1, const PfaffCoeffs& c2, const Matrix& y01,
                                   const Matrix& y02, const MultiIndex& x0, double p, const SweepOrder& sweep) {
  c1.validate();
  c2.validate();
  if (!(c1.chart == c2.chart)) throw Error(ErrorCode::ChartMismatch, "systems live on different charts");
  if (c1.q != c2.q || c1.l != c2.l || c1.b.size() != c2.b.size() || c1.c.size() != c2.c.size())
    throw Error(ErrorCode::ShapeMismatch, "systems have different shapes");
  const TensorField y1 = pfaff_integrate(c1, x0, y01, sweep);
  const TensorField y2 = pfaff_integrate(c2, x0, y02, sweep);
  DependenceGap out;
  out.gap_norm = sobolev_norm(difference(y1, y2), 1, p);
  out.input_gap = max_abs_diff(y01, y02);
  for (std::size_t ax = 0; ax < c1.a.size(); ++ax) out.input_gap += lp_norm(difference(c1.a[ax], c2.a[ax]), p);
  for (std::size_t ax = 0; ax < c1.b.size(); ++ax) out.input_gap += lp_norm(difference(c1.b[ax], c2.b[ax]), p);
  for (std::size_t ax = 0; ax < c1.c.size(); ++ax) out.input_gap += lp_norm(difference(c1.c[ax], c2.c[ax]), p);
  return out;
}

}  // namespace minkembed
