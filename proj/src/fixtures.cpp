#include "minkembed/fixtures.hpp"

#include <cmath>

#include "minkembed/error.hpp"
#include "minkembed/lorentz.hpp"

namespace minkembed {

namespace {

struct Spec {
  const char* name;
  FixtureParams defaults;
};

const std::vector<Spec>& specs() {
  static const std::vector<Spec> all{
      {"minkowski", {}},
      {"boosted_flat", {{"rapidity", 0.5}}},
      {"rindler", {{"delta", 0.0}}},
      {"desitter_slice", {}},
      {"hyperplane_forms", {}},
      {"timelike_sheet_forms", {}},
      {"hyperboloid_forms", {{"k_scale", 1.0}}},
  };
  return all;
}

const Spec& find(const std::string& name) {
  for (const auto& s : specs())
    if (name == s.name) return s;
  throw Error(ErrorCode::UnknownFixture, "unknown fixture '" + name + "'");
}

void need_dim(const std::string& name, const GridChart& chart, std::size_t dim) {
  if (chart.dim() != dim)
    throw Error(ErrorCode::BadParams, name + " needs a " + std::to_string(dim) + "-dimensional chart");
}

TensorField constant(const GridChart& chart, const Matrix& m) {
  return TensorField::sample(chart, {m.rows(), m.cols()},
                             [&](auto, auto out) { std::copy(m.data().begin(), m.data().end(), out.begin()); },
                             {{0, 1}});
}

Matrix minkowski_with_lambda(std::size_t n, bool timelike) {
  Matrix g = Matrix::identity(n);
  if (timelike) g(0, 0) = -1.0;
  return g;
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& s : specs()) out.emplace_back(s.name);
  return out;
}

GridChart default_chart(const std::string& name, std::size_t samples, std::size_t dim) {
  find(name);
  if (name == "rindler") return GridChart({Axis{0.0, 1.0, samples}, Axis{0.5, 1.5, samples}});
  if (name == "desitter_slice") return GridChart({Axis{-0.5, 0.5, samples}, Axis{0.0, 1.0, samples}});
  if (name == "hyperboloid_forms") return GridChart::uniform(2, -0.5, 0.5, samples);
  if (name == "hyperplane_forms" || name == "timelike_sheet_forms") return GridChart::uniform(dim, 0.0, 1.0, samples);
  return GridChart::uniform(dim, -1.0, 1.0, samples);
}

Fixture generate_fixture(const std::string& name, const FixtureParams& params, const GridChart& chart) {
  const Spec& spec = find(name);
  Fixture fx{name, spec.defaults, {}, 0};
  for (const auto& [key, value] : params) {
    if (!spec.defaults.count(key)) throw Error(ErrorCode::BadParams, name + " has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw Error(ErrorCode::BadParams, "parameter '" + key + "' must be finite");
    fx.params[key] = value;
  }
  const std::size_t m = chart.dim();

  if (name == "minkowski") {
    fx.fields.emplace("g", constant(chart, minkowski_with_lambda(m, true)));
  } else if (name == "boosted_flat") {
    if (m < 2) throw Error(ErrorCode::BadParams, "boosted_flat needs dimension >= 2");
    const double r = fx.params["rapidity"];
    if (std::abs(r) > 5.0) throw Error(ErrorCode::BadParams, "rapidity must satisfy |rapidity| <= 5");
    Matrix l = Matrix::identity(m);
    l(0, 0) = l(1, 1) = std::cosh(r);
    l(0, 1) = l(1, 0) = std::sinh(r);
    fx.fields.emplace("g", constant(chart, mink_gram(l, l)));
  } else if (name == "rindler") {
    need_dim(name, chart, 2);
    if (!(chart.axis(1).min > 0.0)) throw Error(ErrorCode::BadParams, "rindler needs rho > 0 on the whole chart");
    const double delta = fx.params["delta"];
    if (std::abs(delta) > 0.1) throw Error(ErrorCode::BadParams, "rindler needs |delta| <= 0.1");
    fx.fields.emplace("g", TensorField::sample(chart, {2, 2}, [&](auto x, auto out) {
      const double t = x[0], rho = x[1];
      const double c = delta * std::cos(t + rho);
      const double dt[2] = {rho * std::cosh(t) + c, rho * std::sinh(t) + delta * rho * rho};
      const double dr[2] = {std::sinh(t) + c, std::cosh(t) + 2.0 * delta * t * rho};
      out[0] = -dt[0] * dt[0] + dt[1] * dt[1];
      out[1] = out[2] = -dt[0] * dr[0] + dt[1] * dr[1];
      out[3] = -dr[0] * dr[0] + dr[1] * dr[1];
    }, {{0, 1}}));
  } else if (name == "desitter_slice") {
    need_dim(name, chart, 2);
    fx.fields.emplace("g", TensorField::sample(chart, {2, 2}, [](auto x, auto out) {
      const double c = std::cosh(x[0]);
      out[0] = -1.0;
      out[1] = out[2] = 0.0;
      out[3] = c * c;
    }, {{0, 1}}));
  } else if (name == "hyperplane_forms" || name == "timelike_sheet_forms") {
    const bool timelike = name == "timelike_sheet_forms";
    if (timelike && m < 1) throw Error(ErrorCode::BadParams, "timelike_sheet_forms needs dimension >= 1");
    fx.fields.emplace("g", constant(chart, minkowski_with_lambda(m, timelike)));
    fx.fields.emplace("K", constant(chart, Matrix(m, m)));
    fx.lambda = timelike ? 1 : -1;
  } else {
    need_dim(name, chart, 2);
    const double s = fx.params["k_scale"];
    auto g = [](auto x, auto out) {
      const double c = std::cosh(x[0]);
      out[0] = 1.0;
      out[1] = out[2] = 0.0;
      out[3] = c * c;
    };
    fx.fields.emplace("g", TensorField::sample(chart, {2, 2}, g, {{0, 1}}));
    fx.fields.emplace("K", TensorField::sample(chart, {2, 2}, [&](auto x, auto out) {
      g(x, out);
      for (auto& v : out) v *= s;
    }, {{0, 1}}));
    fx.lambda = -1;
  }
  return fx;
}

FundamentalForms fixture_forms(const Fixture& fixture) {
  if (fixture.lambda == 0 || !fixture.fields.count("K"))
    throw Error(ErrorCode::InvalidInput, fixture.name + " does not carry fundamental forms");
  const TensorField& g = fixture.fields.at("g");
  return {g.chart(), g, fixture.fields.at("K"), fixture.lambda};
}

}  // namespace minkembed
