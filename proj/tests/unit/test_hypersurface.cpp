#include <cmath>

#include "analytic.hpp"
#include "convergence.hpp"
#include "doctest.h"
#include "error_code.hpp"
#include "minkembed/error.hpp"
#include "minkembed/hypersurface.hpp"
#include "minkembed/lorentz.hpp"
#include "random_fields.hpp"

using namespace minkembed;
using testsupport::code_of;

namespace {

GridChart square(std::size_t n, double lo = -0.5, double hi = 0.5) { return GridChart::uniform(2, lo, hi, n); }

FundamentalForms hyperboloid(std::size_t n, double k_scale = 1.0) {
  GridChart c = square(n);
  auto g = [](auto x, auto out) {
    const double ch = std::cosh(x[0]);
    out[0] = 1.0;
    out[1] = out[2] = 0.0;
    out[3] = ch * ch;
  };
  auto k = [&](auto x, auto out) {
    g(x, out);
    for (auto& v : out) v *= k_scale;
  };
  return {c, TensorField::sample(c, {2, 2}, g, {{0, 1}}), TensorField::sample(c, {2, 2}, k, {{0, 1}}), -1};
}

// eta(y, y) = +1 on (t, phi): g = diag(-1, cosh^2 t), K = g with l = y.
FundamentalForms de_sitter_sheet(std::size_t n) {
  GridChart c = square(n);
  auto g = [](auto x, auto out) {
    const double ch = std::cosh(x[0]);
    out[0] = -1.0;
    out[1] = out[2] = 0.0;
    out[3] = ch * ch;
  };
  auto gf = TensorField::sample(c, {2, 2}, g, {{0, 1}});
  return {c, gf, gf, 1};
}

FundamentalForms constant_forms(const Matrix& g, int lambda) {
  GridChart c = GridChart::uniform(2, 0.0, 1.0, 9);
  auto gf = TensorField::sample(c, {2, 2}, [&](auto, auto out) {
    std::copy(g.data().begin(), g.data().end(), out.begin());
  }, {{0, 1}});
  return {c, gf, TensorField(c, {2, 2}), lambda};
}

// Exact frame [d_u y, d_v y, -y] of the hyperboloid.
Matrix hyperboloid_frame(std::span<const double> x) {
  const double u = x[0], v = x[1];
  return Matrix{{std::sinh(u) * std::cosh(v), std::cosh(u) * std::sinh(v), -std::cosh(u) * std::cosh(v)},
                {std::cosh(u), 0.0, -std::sinh(u)},
                {std::sinh(u) * std::sinh(v), std::cosh(u) * std::cosh(v), -std::cosh(u) * std::sinh(v)}};
}

double family(const ResidualReport& r, const std::string& label) {
  for (const auto& s : r.per_equation)
    if (s.label == label) return s.max_abs;
  FAIL("missing family " << label);
  return 0.0;
}

}  // namespace

TEST_CASE("zero operators give a constant frame and an affine immersion") {
  GridChart c = square(9);
  RiggedOperators ops{c, TensorField(c, {2, 2, 2}), TensorField(c, {2, 2}), TensorField(c, {2, 2}), TensorField(c, {2})};
  auto gc = generalized_gc_residual(ops, 4.0);
  CHECK(gc.max_abs == 0.0);
  Matrix fs{{1, 0, 0.5}, {0, 2, 0}, {0, 0, 1}};
  auto res = immerse_hypersurface_rigged(ops, c.center(), fs);
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    CHECK(max_abs_diff(res.frame.matrix_at(pt), fs) == 0.0);
    const auto x = c.coords(pt);
    const auto x0 = c.coords(c.linear(c.center()));
    for (std::size_t r = 0; r < 3; ++r) {
      const double expect = fs(r, 0) * (x[0] - x0[0]) + fs(r, 1) * (x[1] - x0[1]);
      CHECK(std::abs(res.f(pt, r) - expect) < 1e-14);
    }
  }
}

TEST_CASE("assembled coefficient blocks") {
  testsupport::SmoothRandom rnd(7);
  GridChart c = GridChart::uniform(3, -1.0, 1.0, 5);
  auto ops = rnd.rigged(c);
  auto coeffs = assemble_rigging_coeffs(ops);
  REQUIRE(coeffs.a.size() == 3);
  CHECK(coeffs.b.empty());
  CHECK(coeffs.c.empty());
  const std::size_t n = 3, d = 4;
  for (std::size_t pt = 0; pt < c.points(); pt += 11)
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix a = coeffs.a[i].matrix_at(pt);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t h = 0; h < n; ++h) CHECK(a(k, h) == ops.gamma(pt, (k * n + i) * n + h));
        CHECK(a(k, n) == ops.l(pt, k * n + i));
      }
      for (std::size_t h = 0; h < n; ++h) CHECK(a(n, h) == -ops.k(pt, i * n + h));
      CHECK(a(n, n) == -ops.m(pt, i));
      CHECK(a.rows() == d);
    }
}

TEST_CASE("generalised Gauss-Codazzi fields are the blocks of the compatibility residual") {
  for (unsigned seed : {1u, 2u, 3u}) {
    testsupport::SmoothRandom rnd(seed);
    GridChart c = seed == 3 ? GridChart::uniform(3, -1.0, 1.0, 7) : square(13, -1.0, 1.0);
    auto ops = rnd.rigged(c);
    const std::size_t n = c.dim(), d = n + 1;
    auto gc = generalized_gc_fields(ops);
    auto z = pfaff_compatibility_fields(assemble_rigging_coeffs(ops));
    std::size_t idx = 0;
    double worst = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++idx) {
        const TensorField& zij = z[idx].second;
        for (std::size_t pt = 0; pt < c.points(); ++pt) {
          for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t h = 0; h < n; ++h) {
              const double e = gc.gauss(pt, ((k * n + h) * n + i) * n + j);
              worst = std::max(worst, std::abs(zij(pt, k * d + h) - e));
              scale = std::max(scale, std::abs(e));
            }
            worst = std::max(worst, std::abs(zij(pt, k * d + n) - gc.codazzi2(pt, (k * n + i) * n + j)));
          }
          for (std::size_t h = 0; h < n; ++h)
            worst = std::max(worst, std::abs(zij(pt, n * d + h) + gc.codazzi1(pt, (i * n + j) * n + h)));
          worst = std::max(worst, std::abs(zij(pt, n * d + n) + gc.codazzi3(pt, i * n + j)));
        }
      }
    CHECK(z.size() == idx);
    CHECK(worst <= 1e-12 * scale);
  }
}

TEST_CASE("hyperboloid forms satisfy the classical equations at second order") {
  std::vector<double> hs, gauss, codazzi, gen;
  for (std::size_t n : {33, 65, 129}) {
    auto forms = hyperboloid(n);
    auto r = classical_gc_residual(forms, 4.0);
    hs.push_back(forms.chart.spacing(0));
    gauss.push_back(family(r, "gauss"));
    codazzi.push_back(family(r, "codazzi"));
    gen.push_back(generalized_gc_residual(specialize_from_forms(forms), 4.0).max_abs);
  }
  CHECK(gauss.back() < 1e-3);
  CHECK(testsupport::observed_order(hs, gauss) >= 1.9);
  // K = g is parallel for the discrete connection as well
  CHECK(codazzi.back() <= 1e-12);
  CHECK(testsupport::observed_order(hs, gen) >= 1.9);
}

TEST_CASE("scaled second form is detected") {
  for (std::size_t n : {33, 65, 129}) {
    auto r = classical_gc_residual(hyperboloid(n, 2.0), 4.0);
    // R + lambda K K^sharp terms = (1 - 4) x curvature terms
    CHECK(family(r, "gauss") > 2.5);
  }
}

TEST_CASE("specialised operators have vanishing third Codazzi family") {
  auto ops = specialize_from_forms(hyperboloid(17, 1.3));
  auto gc = generalized_gc_fields(ops);
  CHECK(max_norm(gc.codazzi3) <= 1e-12);
  for (std::size_t pt = 0; pt < ops.chart.points(); ++pt) CHECK(ops.m(pt, 0) == 0.0);
}

TEST_CASE("hyperboloid immersion matches the exact surface up to an isometry") {
  std::vector<double> hs, err, first, second, structure, normal;
  for (std::size_t n : {33, 65, 129}) {
    auto forms = hyperboloid(n);
    auto res = immerse_hypersurface_forms(forms, forms.chart.center(), 0.5);
    CHECK(res.min_frame_det > 0.0);
    CHECK(determinant(res.base_frame) > 0.0);
    const auto xs = forms.chart.coords(forms.chart.linear(forms.chart.center()));
    const Matrix q = res.base_frame * inverse(hyperboloid_frame(xs));
    CHECK(is_mink_orthogonal(q, 1e-10).orthogonal);
    Vector ys(3);
    testsupport::Hyperboloid::point(xs, ys);
    double e = 0.0;
    for (std::size_t pt = 0; pt < forms.chart.points(); ++pt) {
      Vector y(3);
      testsupport::Hyperboloid::point(forms.chart.coords(pt), y);
      for (std::size_t r = 0; r < 3; ++r) {
        double v = 0.0;
        for (std::size_t c = 0; c < 3; ++c) v += q(r, c) * (y[c] - ys[c]);
        e = std::max(e, std::abs(res.f(pt, r) - v));
      }
    }
    auto defect = fundamental_form_defect(res, forms, 4.0);
    hs.push_back(forms.chart.spacing(0));
    err.push_back(e);
    first.push_back(family(defect, "first"));
    second.push_back(family(defect, "second"));
    structure.push_back(rigged_structure_defect(res, specialize_from_forms(forms), 4.0).max_abs);
    normal.push_back(family(defect, "normal"));
    CHECK(family(defect, "orthogonal") < 1e-3);
  }
  CHECK(testsupport::observed_order(hs, normal) >= 1.9);
  CHECK(err.back() < 1e-4);
  CHECK(testsupport::observed_order(hs, err) >= 1.9);
  CHECK(testsupport::observed_order(hs, first) >= 1.9);
  CHECK(testsupport::observed_order(hs, second) >= 1.9);
  CHECK(testsupport::observed_order(hs, structure) >= 1.9);
}

TEST_CASE("timelike de Sitter sheet") {
  std::vector<double> hs, gauss, first;
  for (std::size_t n : {33, 65, 129}) {
    auto forms = de_sitter_sheet(n);
    hs.push_back(forms.chart.spacing(0));
    gauss.push_back(family(classical_gc_residual(forms, 4.0), "gauss"));
    auto res = immerse_hypersurface_forms(forms, forms.chart.center(), 0.5);
    first.push_back(family(fundamental_form_defect(res, forms, 4.0), "first"));
  }
  CHECK(testsupport::observed_order(hs, gauss) >= 1.9);
  CHECK(testsupport::observed_order(hs, first) >= 1.9);
}

TEST_CASE("reconstructed operators are invariant under Minkowski motions") {
  auto forms = hyperboloid(33);
  auto res = immerse_hypersurface_forms(forms, forms.chart.center(), 0.5);
  auto a = reconstruct_operators(res.f, res.rigging);
  const double r = 0.7, th = 1.1;
  Matrix q = Matrix{{std::cosh(r), std::sinh(r), 0}, {std::sinh(r), std::cosh(r), 0}, {0, 0, 1}} *
             Matrix{{1, 0, 0}, {0, std::cos(th), -std::sin(th)}, {0, std::sin(th), std::cos(th)}};
  const Vector shift{3.0, -2.0, 0.5};
  TensorField f2 = res.f, l2 = res.rigging;
  for (std::size_t pt = 0; pt < forms.chart.points(); ++pt) {
    const Vector fv(res.f.at(pt).begin(), res.f.at(pt).end());
    const Vector lv(res.rigging.at(pt).begin(), res.rigging.at(pt).end());
    const Vector fq = q * fv, lq = q * lv;
    for (std::size_t k = 0; k < 3; ++k) {
      f2(pt, k) = fq[k] + shift[k];
      l2(pt, k) = lq[k];
    }
  }
  auto b = reconstruct_operators(f2, l2);
  CHECK(max_norm(difference(a.gamma, b.gamma)) < 1e-9);
  CHECK(max_norm(difference(a.k, b.k)) < 1e-9);
  CHECK(max_norm(difference(a.l, b.l)) < 1e-9);
  CHECK(max_norm(difference(a.m, b.m)) < 1e-9);
  // and close to the input operators
  auto ops = specialize_from_forms(forms);
  CHECK(max_norm(difference(a.k, ops.k)) < 1e-3);
  CHECK(max_norm(difference(a.gamma, ops.gamma)) < 1e-3);
}

TEST_CASE("flat forms immerse exactly") {
  SUBCASE("spacelike hyperplane") {
    auto forms = constant_forms(Matrix{{2.0, 0.3}, {0.3, 1.0}}, -1);
    auto res = immerse_hypersurface_forms(forms, {4, 4}, 0.2);
    auto defect = fundamental_form_defect(res, forms, 4.0);
    CHECK(defect.max_abs < 1e-12);
    CHECK(classical_gc_residual(forms, 4.0).max_abs == 0.0);
  }
  SUBCASE("timelike sheet") {
    auto forms = constant_forms(Matrix{{-1.0, 0.2}, {0.2, 1.5}}, 1);
    auto res = immerse_hypersurface_forms(forms, {0, 8}, 0.2);
    auto defect = fundamental_form_defect(res, forms, 4.0);
    CHECK(defect.max_abs < 1e-12);
    CHECK(determinant(res.base_frame) > 0.0);
  }
}

TEST_CASE("initial frame has positive determinant in every dimension") {
  for (std::size_t n : {1u, 2u, 3u, 4u}) {
    GridChart c = GridChart::uniform(n, 0.0, 1.0, 4);
    Matrix g = Matrix::identity(n);
    g(0, 0) = 3.0;
    auto gf = TensorField::sample(c, {n, n}, [&](auto, auto out) {
      std::copy(g.data().begin(), g.data().end(), out.begin());
    });
    FundamentalForms forms{c, gf, TensorField(c, {n, n}), -1};
    const Matrix f = forms_initial_frame(forms, MultiIndex(n, 0), 0.2);
    CHECK(determinant(f) > 0.0);
    Matrix block(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) block(i, i) = g(i, i);
    block(n, n) = -1.0;
    CHECK(max_abs_diff(mink_gram(f, f), block) < 1e-12);
  }
}

TEST_CASE("error reporting") {
  SUBCASE("mixed signature") {
    GridChart c = GridChart::uniform(2, -1.0, 1.0, 6);
    auto g = TensorField::sample(c, {2, 2}, [](auto x, auto out) {
      out[0] = 1.0;
      out[1] = out[2] = 0.0;
      out[3] = x[1];
    });
    FundamentalForms forms{c, g, TensorField(c, {2, 2}), -1};
    CHECK(code_of([&] { forms.validate(); }) == ErrorCode::MixedSignature);
  }
  SUBCASE("lambda disagrees with the signature") {
    auto forms = hyperboloid(9);
    forms.lambda = 1;
    CHECK(code_of([&] { forms.validate(); }) == ErrorCode::InvalidInput);
  }
  SUBCASE("block outside the certified class") {
    auto forms = hyperboloid(9);
    CHECK(code_of([&] { forms_initial_frame(forms, forms.chart.center(), 1.0); }) == ErrorCode::NotLorentzBlock);
  }
  SUBCASE("singular initial frame") {
    auto ops = specialize_from_forms(hyperboloid(9));
    Matrix fs = Matrix::identity(3);
    fs(2, 2) = 0.0;
    CHECK(code_of([&] { immerse_hypersurface_rigged(ops, ops.chart.center(), fs); }) == ErrorCode::SingularFstar);
  }
  SUBCASE("asymmetric K") {
    GridChart c = square(5);
    RiggedOperators ops{c, TensorField(c, {2, 2, 2}), TensorField(c, {2, 2}), TensorField(c, {2, 2}),
                        TensorField(c, {2})};
    ops.k(3, 1) = 1.0;
    CHECK(code_of([&] { ops.validate(); }) == ErrorCode::InvalidInput);
  }
  SUBCASE("wrong shape") {
    GridChart c = square(5);
    RiggedOperators ops{c, TensorField(c, {2, 2}), TensorField(c, {2, 2}), TensorField(c, {2, 2}), TensorField(c, {2})};
    CHECK(code_of([&] { assemble_rigging_coeffs(ops); }) == ErrorCode::ShapeMismatch);
  }
}
