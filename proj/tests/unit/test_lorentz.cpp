#include <cmath>

#include "doctest.h"
#include "minkembed/error.hpp"
#include "minkembed/lorentz.hpp"
#include "error_code.hpp"

using namespace minkembed;
using testsupport::code_of;

namespace {

SymMatrix sym(const Matrix& m) { return SymMatrix::from_matrix(m); }

}  // namespace

TEST_CASE("Minkowski metric is its own decomposition") {
  auto cert = certify_lorentz(sym(Matrix{{-1, 0}, {0, 1}}), 0.5);
  auto a = lorentz_decompose(cert);
  CHECK(max_abs_diff(a.base_f, Matrix::identity(2)) < 1e-15);
}

TEST_CASE("diagonal metric decomposes into square roots") {
  auto a = lorentz_decompose(certify_lorentz(sym(Matrix{{-4, 0}, {0, 9}}), 0.1));
  CHECK(max_abs_diff(a.base_f, Matrix{{2, 0}, {0, 3}}) < 1e-14);
}

TEST_CASE("off-diagonal metric: eigenbasis of the swap matrix") {
  auto a = lorentz_decompose(certify_lorentz(sym(Matrix{{0, 1}, {1, 0}}), 0.5));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(a.base_f, Matrix{{r, -r}, {r, r}}) < 1e-14);
  CHECK(max_abs_diff(mink_gram(a.base_f, a.base_f), Matrix{{0, 1}, {1, 0}}) < 1e-14);
}

TEST_CASE("certification failures name the violated condition") {
  CHECK(code_of([] { certify_lorentz(sym(Matrix{{1, 0}, {0, 1}}), 0.5); }) == ErrorCode::WrongSignature);
  CHECK(code_of([] { certify_lorentz(sym(Matrix{{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}}), 0.5); }) ==
        ErrorCode::WrongSignature);
  CHECK(code_of([] { certify_lorentz(sym(Matrix{{-0.1, 0}, {0, 1}}), 0.5); }) == ErrorCode::OutOfClass);
  CHECK(code_of([] { certify_lorentz(sym(Matrix{{-1, 0}, {0, 3}}), 0.5); }) == ErrorCode::OutOfClass);
  CHECK(code_of([] { certify_lorentz(sym(Matrix{{-1, 0}, {0, 1}}), 0.0); }) == ErrorCode::InvalidInput);
  try {
    certify_lorentz(sym(Matrix{{-1, 0}, {0, 3}}), 0.5);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("1/epsilon") != std::string::npos);
  }
}

TEST_CASE("anchored map branches") {
  auto anchor = lorentz_decompose(certify_lorentz(sym(Matrix{{-1, 0}, {0, 1}}), 0.5));

  auto same = lorentz_decompose_anchored_ex(anchor, certify_lorentz(sym(Matrix{{-1, 0}, {0, 1}}), 0.5));
  CHECK(same.branch == DecompBranch::Identity);
  CHECK(same.f == anchor.base_f);

  auto near = lorentz_decompose_anchored_ex(anchor, certify_lorentz(sym(Matrix{{-1.01, 0}, {0, 1}}), 0.5));
  CHECK(near.branch == DecompBranch::Near);
  CHECK(max_abs_diff(near.f, Matrix{{std::sqrt(1.01), 0}, {0, 1}}) < 1e-14);

  auto far = lorentz_decompose_anchored_ex(anchor, certify_lorentz(sym(Matrix{{-1.5, 0}, {0, 1.2}}), 0.5));
  CHECK(far.branch == DecompBranch::Far);
  CHECK(max_abs_diff(far.f, Matrix{{std::sqrt(1.5), 0}, {0, std::sqrt(1.2)}}) < 1e-14);

  CHECK(code_of([&] { lorentz_decompose_anchored(anchor, certify_lorentz(sym(Matrix{{-1, 0}, {0, 1}}), 0.4)); }) ==
        ErrorCode::EpsilonMismatch);
}

TEST_CASE("near branch reproduces the target metric") {
  Matrix g{{-1.2, 0.3, 0.1}, {0.3, 1.5, -0.2}, {0.1, -0.2, 0.9}};
  Matrix gt = g;
  gt(0, 1) += 4e-4;
  gt(1, 0) += 4e-4;
  gt(2, 2) -= 2e-4;
  auto anchor = lorentz_decompose(certify_lorentz(sym(g), 0.5));
  auto res = lorentz_decompose_anchored_ex(anchor, certify_lorentz(sym(gt), 0.5));
  CHECK(res.branch == DecompBranch::Near);
  CHECK(max_abs_diff(mink_gram(res.f, res.f), gt) < 1e-13);
  CHECK(op_norm(res.f - anchor.base_f) <= lipschitz_constant(0.5, 2) * 4e-4);
}

TEST_CASE("boosts are proper Minkowski isometries, reflections are not") {
  const double r = 0.7;
  Matrix boost{{std::cosh(r), std::sinh(r)}, {std::sinh(r), std::cosh(r)}};
  auto c = is_mink_orthogonal(boost, 1e-12);
  CHECK(c.orthogonal);
  CHECK(c.proper);
  auto refl = is_mink_orthogonal(Matrix{{1, 0}, {0, -1}}, 1e-12);
  CHECK(refl.orthogonal);
  CHECK_FALSE(refl.proper);
  CHECK_FALSE(is_mink_orthogonal(Matrix{{1, 0.1}, {0, 1}}, 1e-12).orthogonal);
}

TEST_CASE("isometry inverse and composition") {
  const double r = 0.3;
  auto t = MinkIsometry::make(Matrix{{std::cosh(r), std::sinh(r)}, {std::sinh(r), std::cosh(r)}}, Vector{1, -2});
  auto id = t.compose(t.inverse());
  CHECK(max_abs_diff(id.q, Matrix::identity(2)) < 1e-14);
  CHECK(std::abs(id.v[0]) < 1e-14);
  CHECK(std::abs(id.v[1]) < 1e-14);
  CHECK_THROWS_AS(MinkIsometry::make(Matrix{{2, 0}, {0, 1}}, Vector{0, 0}), Error);
}

TEST_CASE("Lipschitz constant scaling") {
  CHECK(lipschitz_constant(1.0, 1) == doctest::Approx(lipschitz_prefactor(1)));
  CHECK(lipschitz_constant(0.5, 2) == doctest::Approx(lipschitz_prefactor(2) * std::pow(2.0, 5.5)));
  CHECK(lipschitz_prefactor(3) >= 1.0);
}
