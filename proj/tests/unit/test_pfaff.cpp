#include <cmath>

#include "analytic.hpp"
#include "convergence.hpp"
#include "doctest.h"
#include "error_code.hpp"
#include "minkembed/error.hpp"
#include "minkembed/pfaff.hpp"

using namespace minkembed;
using testsupport::code_of;
using testsupport::Rindler;

namespace {

GridChart rindler_chart(std::size_t n) { return GridChart({Axis{0.0, 1.0, n}, Axis{0.5, 1.5, n}}); }

PfaffCoeffs rindler_coeffs(std::size_t n) {
  auto g = TensorField::sample(rindler_chart(n), {2, 2}, Rindler::metric, {{0, 1}});
  return PfaffCoeffs::from_christoffel(christoffel(g));
}

PfaffCoeffs desitter_coeffs(std::size_t n) {
  auto g = TensorField::sample(GridChart::uniform(2, 0, 1, n), {2, 2}, testsupport::DeSitterSlice::metric, {{0, 1}});
  return PfaffCoeffs::from_christoffel(christoffel(g));
}

Matrix frame_at(const Vector& x) {
  Matrix f(2, 2);
  Rindler::frame(x, f.data());
  return f;
}

}  // namespace

TEST_CASE("zero coefficients keep the initial value") {
  GridChart c = GridChart::uniform(2, 0, 1, 6);
  PfaffCoeffs z{c, 2, 3, {}, {}, {}};
  for (int a = 0; a < 2; ++a) z.a.emplace_back(c, std::vector<std::size_t>{3, 3});
  Matrix y0{{1, 2, 3}, {4, 5, 6}};
  auto y = pfaff_integrate(z, {2, 3}, y0);
  for (std::size_t pt = 0; pt < c.points(); ++pt) CHECK(y.matrix_at(pt) == y0);
  CHECK(pfaff_compatibility_residual(z, 4.0).max_abs == 0.0);
  CHECK(pfaff_integrate_path(z, {{0, 0}, {{0, 1, 5}, {1, 1, 5}}}, y0) == y0);
}

TEST_CASE("scalar exponential") {
  GridChart c = GridChart::uniform(1, 0, 1, 21);
  PfaffCoeffs e{c, 1, 1, {}, {}, {}};
  e.a.push_back(TensorField::sample(c, {1, 1}, [](auto, auto out) { out[0] = 1.0; }));
  auto y = pfaff_integrate(e, {0}, Matrix{{1.0}});
  CHECK(y(0, 0) == 1.0);
  CHECK(std::abs(y(20, 0) - std::exp(1.0)) < 1e-6);
}

TEST_CASE("initial value honoured bitwise and linearity in Y0") {
  auto c = rindler_coeffs(17);
  Matrix y1{{0.3, -1.7}, {2.1, 0.4}};
  Matrix y2{{-1.1, 0.2}, {0.5, 3.3}};
  auto a = pfaff_integrate(c, {5, 9}, y1);
  auto b = pfaff_integrate(c, {5, 9}, y2);
  auto s = pfaff_integrate(c, {5, 9}, y1 + 2.0 * y2);
  CHECK(a.matrix_at(c.chart.linear({5, 9})) == y1);
  double err = 0.0;
  for (std::size_t k = 0; k < s.data().size(); ++k)
    err = std::max(err, std::abs(s.data()[k] - a.data()[k] - 2.0 * b.data()[k]));
  CHECK(err < 1e-12);
}

TEST_CASE("Rindler frame equation converges to the analytic frame") {
  std::vector<double> hs, errs;
  for (std::size_t n : {17, 33, 65}) {
    auto c = rindler_coeffs(n);
    const MultiIndex x0 = c.chart.center();
    auto y = pfaff_integrate(c, x0, frame_at(c.chart.coords(c.chart.linear(x0))));
    double err = 0.0;
    for (std::size_t pt = 0; pt < c.chart.points(); ++pt)
      err = std::max(err, max_abs_diff(y.matrix_at(pt), frame_at(c.chart.coords(pt))));
    hs.push_back(c.chart.spacing(0));
    errs.push_back(err);
  }
  CHECK(errs.back() < 1e-4);
  CHECK(testsupport::observed_order(hs, errs) >= 1.9);
}

TEST_CASE("sweep order does not matter for compatible systems") {
  std::vector<double> hs, gaps;
  for (std::size_t n : {17, 33, 65}) {
    auto c = rindler_coeffs(n);
    Matrix y0{{1.0, 0.2}, {0.1, 1.3}};
    const MultiIndex x0{3 * (n - 1) / 16, 4 * (n - 1) / 16};
    auto a = pfaff_integrate(c, x0, y0, {0, 1});
    auto b = pfaff_integrate(c, x0, y0, {1, 0});
    hs.push_back(c.chart.spacing(0));
    gaps.push_back(max_norm(difference(a, b)));
  }
  CHECK(testsupport::observed_order(hs, gaps) >= 1.9);
  CHECK(code_of([] { pfaff_integrate(rindler_coeffs(9), {0, 0}, Matrix::identity(2), {0, 0}); }) ==
        ErrorCode::InvalidInput);
}

TEST_CASE("compatibility residual: flat converges, curved does not") {
  std::vector<double> hs, errs;
  for (std::size_t n : {33, 65, 129}) {
    hs.push_back(1.0 / static_cast<double>(n - 1));
    errs.push_back(pfaff_compatibility_residual(rindler_coeffs(n), 4.0).max_abs);
    CHECK(pfaff_compatibility_residual(desitter_coeffs(n), 4.0).max_abs > 0.9);
  }
  CHECK(testsupport::observed_order(hs, errs) >= 1.9);
}

TEST_CASE("path integration: flat agrees, curved has holonomy") {
  StaircasePath p1{{0, 0}, {{0, 1, 8}, {1, 1, 8}}};
  StaircasePath p2{{0, 0}, {{1, 1, 8}, {0, 1, 8}}};
  std::vector<double> hs, gaps;
  for (std::size_t scale : {1, 2, 4}) {
    const std::size_t n = 16 * scale + 1;
    auto scaled = [&](StaircasePath p) {
      for (auto& mv : p.moves) mv.steps *= scale;
      return p;
    };
    auto c = rindler_coeffs(n);
    Matrix y0 = frame_at(c.chart.coords(0));
    auto e1 = pfaff_integrate_path(c, scaled(p1), y0);
    auto e2 = pfaff_integrate_path(c, scaled(p2), y0);
    hs.push_back(1.0 / static_cast<double>(n - 1));
    gaps.push_back(max_abs_diff(e1, e2));
    auto d = desitter_coeffs(n);
    CHECK(max_abs_diff(pfaff_integrate_path(d, scaled(p1), Matrix::identity(2)),
                       pfaff_integrate_path(d, scaled(p2), Matrix::identity(2))) > 0.05);
  }
  CHECK(testsupport::observed_order(hs, gaps) >= 1.9);
  auto c = rindler_coeffs(9);
  CHECK(code_of([&] { pfaff_integrate_path(c, {{0, 0}, {{0, 1, 9}}}, Matrix::identity(2)); }) ==
        ErrorCode::PathOutOfChart);
  CHECK(code_of([&] { pfaff_integrate_path(c, {{2, 2}, {{1, -1, 3}}}, Matrix::identity(2)); }) ==
        ErrorCode::PathOutOfChart);
}

TEST_CASE("overflow is reported") {
  GridChart c = GridChart::uniform(1, 0, 1, 11);
  PfaffCoeffs e{c, 1, 1, {}, {}, {}};
  e.a.push_back(TensorField::sample(c, {1, 1}, [](auto, auto out) { out[0] = 1e40; }));
  CHECK(code_of([&] { pfaff_integrate(e, {0}, Matrix{{1.0}}); }) == ErrorCode::NonFiniteState);
}

TEST_CASE("B and C terms") {
  // dY/dx = B Y + C with B = 2, C = 1: Y = (Y0 + 1/2) e^{2x} - 1/2
  GridChart c = GridChart::uniform(1, 0, 1, 41);
  PfaffCoeffs e{c, 1, 1, {}, {}, {}};
  e.a.emplace_back(c, std::vector<std::size_t>{1, 1});
  e.b.push_back(TensorField::sample(c, {1, 1}, [](auto, auto out) { out[0] = 2.0; }));
  e.c.push_back(TensorField::sample(c, {1, 1}, [](auto, auto out) { out[0] = 1.0; }));
  auto y = pfaff_integrate(e, {20}, Matrix{{1.0}});
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    const double x = c.coords(pt)[0] - 0.5;
    CHECK(std::abs(y(pt, 0) - (1.5 * std::exp(2 * x) - 0.5)) < 1e-6);
  }
}

TEST_CASE("mixed C relation sign") {
  // Y = x0 * x1 solves dY/dx_a = C_a with C_0 = x1, C_1 = x0 (compatible);
  // with A_0 = 1 the C relation picks up -C_1 A_0 = -x0.
  GridChart c = GridChart::uniform(2, 0, 1, 9);
  PfaffCoeffs e{c, 1, 1, {}, {}, {}};
  e.a.emplace_back(c, std::vector<std::size_t>{1, 1});
  e.a.emplace_back(c, std::vector<std::size_t>{1, 1});
  e.c.push_back(TensorField::sample(c, {1, 1}, [](auto x, auto out) { out[0] = x[1]; }));
  e.c.push_back(TensorField::sample(c, {1, 1}, [](auto x, auto out) { out[0] = x[0]; }));
  CHECK(pfaff_compatibility_residual(e, 2.0).max_abs < 1e-13);
  e.a[0] = TensorField::sample(c, {1, 1}, [](auto, auto out) { out[0] = 1.0; });
  auto rep = pfaff_compatibility_residual(e, kInfinity);
  CHECK(rep.max_abs == doctest::Approx(1.0));
  CHECK(rep.per_equation.back().label == "C[01]");
}

TEST_CASE("Poincare integration") {
  GridChart c({Axis{-1, 1, 7}, Axis{0, 2, 9}});
  Matrix m{{1, 2}, {-3, 0.5}, {0.25, 4}};
  auto f = TensorField::sample(c, {3, 2}, [&](auto, auto out) { std::copy(m.data().begin(), m.data().end(), out.begin()); });
  Vector f0{1, 2, 3};
  auto y = poincare_integrate(f, {3, 4}, f0);
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    const auto x = c.coords(pt);
    for (std::size_t r = 0; r < 3; ++r)
      CHECK(std::abs(y(pt, r) - (f0[r] + m(r, 0) * x[0] + m(r, 1) * (x[1] - 1.0))) < 1e-13);
  }
  CHECK(poincare_compatibility_residual(f, 4.0).max_abs < 1e-13);

  auto zero = poincare_integrate(TensorField(c, {3, 2}), {0, 0}, f0);
  for (std::size_t pt = 0; pt < c.points(); ++pt) CHECK(Vector(zero.at(pt).begin(), zero.at(pt).end()) == f0);

  std::vector<double> hs, errs, curls;
  for (std::size_t n : {17, 33, 65}) {
    auto rc = rindler_chart(n);
    auto frame = TensorField::sample(rc, {2, 2}, Rindler::frame);
    const MultiIndex x0 = rc.center();
    Vector y0(2);
    Rindler::embedding(rc.coords(rc.linear(x0)), y0);
    auto emb = poincare_integrate(frame, x0, y0);
    double err = 0.0;
    for (std::size_t pt = 0; pt < rc.points(); ++pt) {
      Vector e(2);
      Rindler::embedding(rc.coords(pt), e);
      err = std::max({err, std::abs(emb(pt, 0) - e[0]), std::abs(emb(pt, 1) - e[1])});
    }
    hs.push_back(rc.spacing(0));
    errs.push_back(err);
    curls.push_back(poincare_compatibility_residual(frame, 4.0).max_abs);
  }
  CHECK(testsupport::observed_order(hs, errs) >= 1.9);
  CHECK(testsupport::observed_order(hs, curls) >= 1.9);

  // swapping the frame columns breaks the symmetry of second derivatives
  auto swapped = TensorField::sample(rindler_chart(33), {2, 2}, [](auto x, auto out) {
    double fr[4];
    Rindler::frame(x, fr);
    out[0] = fr[1];
    out[1] = fr[0];
    out[2] = fr[3];
    out[3] = fr[2];
  });
  CHECK(poincare_compatibility_residual(swapped, 4.0).max_abs > 0.1);
}

TEST_CASE("continuous dependence") {
  auto c = rindler_coeffs(33);
  const MultiIndex x0 = c.chart.center();
  Matrix y0 = frame_at(c.chart.coords(c.chart.linear(x0)));
  auto same = pfaff_dependence_gap(c, c, y0, y0, x0, 4.0);
  CHECK(same.gap_norm == 0.0);
  CHECK(same.input_gap == 0.0);

  std::vector<double> ratios;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    PfaffCoeffs scaled = c;
    for (auto& f : scaled.a)
      for (double& v : f.data()) v *= 1.0 + delta;
    auto g = pfaff_dependence_gap(c, scaled, y0, y0, x0, 4.0);
    CHECK(g.input_gap > 0.0);
    ratios.push_back(g.gap_norm / g.input_gap);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo < 3.0);

  Matrix e{{1e-3, 0}, {0, -2e-3}};
  auto g = pfaff_dependence_gap(c, c, y0, y0 + e, x0, 4.0);
  CHECK(g.input_gap == doctest::Approx(2e-3));
  CHECK(g.gap_norm > 0.0);
}
