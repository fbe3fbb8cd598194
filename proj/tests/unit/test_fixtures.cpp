#include <cmath>

#include "analytic.hpp"
#include "doctest.h"
#include "error_code.hpp"
#include "minkembed/error.hpp"
#include "minkembed/fixtures.hpp"
#include "minkembed/lorentz.hpp"

using namespace minkembed;
using testsupport::code_of;

TEST_CASE("every fixture generates on its default chart") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const GridChart c = default_chart(name, 9);
    auto fx = generate_fixture(name, {}, c);
    REQUIRE(fx.fields.count("g") == 1);
    CHECK(fx.fields.at("g").chart() == c);
    CHECK((fx.lambda != 0) == (fx.fields.count("K") == 1));
  }
}

TEST_CASE("minkowski is constant eta") {
  auto fx = generate_fixture("minkowski", {}, default_chart("minkowski", 5, 3));
  for (std::size_t pt = 0; pt < 125; ++pt) CHECK(fx.fields.at("g").matrix_at(pt) == MinkForm(3).matrix());
}

TEST_CASE("rindler formula evaluation") {
  GridChart c({Axis{-1.0, 0.0, 5}, Axis{2.0, 3.0, 5}});
  auto g = generate_fixture("rindler", {}, c).fields.at("g");
  CHECK(g.matrix_at(c.linear({4, 0})) == Matrix{{-4, 0}, {0, 1}});
  std::array<double, 4> expect{};
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    testsupport::Rindler::metric(c.coords(pt), expect);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(g(pt, k) - expect[k]) < 1e-14);
  }
}

TEST_CASE("perturbed rindler is the pullback of the perturbed embedding") {
  const double delta = 0.03;
  const GridChart c = default_chart("rindler", 7);
  auto g = generate_fixture("rindler", {{"delta", delta}}, c).fields.at("g");
  auto emb = [&](double t, double r, double out[2]) {
    out[0] = r * std::sinh(t) + delta * std::sin(t + r);
    out[1] = r * std::cosh(t) + delta * t * r * r;
  };
  const double h = 1e-5;
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    const auto x = c.coords(pt);
    double a[2], b[2], dt[2], dr[2];
    emb(x[0] + h, x[1], a);
    emb(x[0] - h, x[1], b);
    for (int i = 0; i < 2; ++i) dt[i] = (a[i] - b[i]) / (2 * h);
    emb(x[0], x[1] + h, a);
    emb(x[0], x[1] - h, b);
    for (int i = 0; i < 2; ++i) dr[i] = (a[i] - b[i]) / (2 * h);
    CHECK(g(pt, 0) == doctest::Approx(-dt[0] * dt[0] + dt[1] * dt[1]).epsilon(1e-8));
    CHECK(g(pt, 1) == doctest::Approx(-dt[0] * dr[0] + dt[1] * dr[1]).epsilon(1e-8));
    CHECK(g(pt, 3) == doctest::Approx(-dr[0] * dr[0] + dr[1] * dr[1]).epsilon(1e-8));
  }
}

TEST_CASE("hyperboloid forms are umbilic and match the surface") {
  const GridChart c = default_chart("hyperboloid_forms", 9);
  auto fx = generate_fixture("hyperboloid_forms", {}, c);
  CHECK(max_norm(difference(fx.fields.at("K"), fx.fields.at("g"))) == 0.0);
  CHECK(fx.lambda == -1);
  // induced metric of the parametrised surface by central differences
  const double h = 1e-5;
  for (std::size_t pt = 0; pt < c.points(); ++pt) {
    const auto x = c.coords(pt);
    double p[3], m[3];
    Matrix d(3, 2);
    for (std::size_t a = 0; a < 2; ++a) {
      Vector xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      testsupport::Hyperboloid::point(xp, p);
      testsupport::Hyperboloid::point(xm, m);
      for (std::size_t r = 0; r < 3; ++r) d(r, a) = (p[r] - m[r]) / (2 * h);
    }
    CHECK(max_abs_diff(mink_gram(d, d), fx.fields.at("g").matrix_at(pt)) < 1e-8);
  }
  auto scaled = generate_fixture("hyperboloid_forms", {{"k_scale", 2.0}}, c);
  CHECK(scaled.fields.at("K")(5, 3) == 2.0 * fx.fields.at("g")(5, 3));
}

TEST_CASE("fixture errors") {
  CHECK(code_of([] { generate_fixture("torus", {}, GridChart::uniform(2, 0, 1, 5)); }) == ErrorCode::UnknownFixture);
  CHECK(code_of([] { default_chart("torus", 5); }) == ErrorCode::UnknownFixture);
  CHECK(code_of([] { generate_fixture("rindler", {}, GridChart::uniform(2, 0, 1, 5)); }) == ErrorCode::BadParams);
  CHECK(code_of([] { generate_fixture("rindler", {{"sigma", 1.0}}, default_chart("rindler", 5)); }) ==
        ErrorCode::BadParams);
  CHECK(code_of([] { generate_fixture("hyperboloid_forms", {}, GridChart::uniform(3, 0, 1, 5)); }) ==
        ErrorCode::BadParams);
  CHECK(code_of([] { fixture_forms(generate_fixture("minkowski", {}, GridChart::uniform(2, 0, 1, 5))); }) ==
        ErrorCode::InvalidInput);
}
