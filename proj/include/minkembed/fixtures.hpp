#pragma once

// Closed-form fixtures sampled on a chart.
//
//   minkowski             g = eta (any dimension)
//   boosted_flat          g = L^T eta L, L a boost in the (0, 1) plane with `rapidity`
//   rindler               pullback of (rho sinh tau + delta sin(tau + rho),
//                         rho cosh tau + delta tau rho^2) on (tau, rho), rho > 0;
//                         delta = 0 gives diag(-rho^2, 1)
//   desitter_slice        g = diag(-1, cosh^2 t) on (t, x)
//   hyperplane_forms      g = I, K = 0, lambda = -1
//   timelike_sheet_forms  g = diag(-1, 1, ...), K = 0, lambda = +1
//   hyperboloid_forms     y = (cosh u cosh v, sinh u, cosh u sinh v) on {y.y = -1}:
//                         g = diag(1, cosh^2 u), K = k_scale g, lambda = -1, l = -y

#include <map>
#include <string>
#include <vector>

#include "minkembed/grid.hpp"
#include "minkembed/hypersurface.hpp"

namespace minkembed {

using FixtureParams = std::map<std::string, double>;

struct Fixture {
  std::string name;
  FixtureParams params;                       // with defaults filled in
  std::map<std::string, TensorField> fields;  // "g", and "K" for the forms fixtures
  int lambda = 0;                             // +-1 for the forms fixtures
};

std::vector<std::string> fixture_names();

/// Chart used when none is given: `samples` per axis on the fixture's
/// default domain. `dim` is honoured by the dimension-free fixtures.
GridChart default_chart(const std::string& name, std::size_t samples, std::size_t dim = 2);

/// Throws UnknownFixture, BadParams (unknown key, bad value or a chart the
/// fixture cannot live on).
Fixture generate_fixture(const std::string& name, const FixtureParams& params, const GridChart& chart);

/// Throws InvalidInput unless the fixture carries forms.
FundamentalForms fixture_forms(const Fixture& fixture);

}  // namespace minkembed
