#include "doctest.h"

#include <cmath>

#include "brfw/errors.hpp"
#include "brfw/extension_dtn.hpp"

using namespace brfw;

namespace {

BoundaryFunction gaussian_datum(const RadialGrid& grid) {
  BoundaryFunction u = BoundaryFunction::zero(grid);
  for (std::size_t j = 0; j < grid.size(); ++j)
    u.values(static_cast<Eigen::Index>(j)) = {std::exp(-grid.nodes[j] * grid.nodes[j]), 0.3};
  for (std::size_t j = 0; j < grid.size(); ++j)
    u.values(static_cast<Eigen::Index>(j)) *= std::exp(-0.1 * grid.nodes[j] * grid.nodes[j]);
  return u;
}

}  // namespace

TEST_CASE("geometric x-grid integrates exponentials") {
  const XGrid x = XGrid::geometric(40.0, 50, 8);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.weights[i] * std::exp(-x.nodes[i]);
  CHECK(s == doctest::Approx(-std::expm1(-40.0)).epsilon(1e-13));
  CHECK(x.size() == 400);
  CHECK_THROWS_AS(XGrid::geometric(-1.0), ConfigError);
  CHECK_THROWS_AS(XGrid::geometric(1.0, 0), ConfigError);
}

TEST_CASE("DtN is the dispersion multiplier and matches the x-derivative of the extension") {
  const PhysParams params;
  const RadialGrid grid = build_grid(80, 1.0);
  const BoundaryFunction u = gaussian_datum(grid);
  const BoundaryFunction t = dtn_apply(u, params);
  for (Eigen::Index j = 0; j < u.values.size(); ++j) {
    const double lam = lambda_of(grid.nodes[j], params);
    CHECK(std::abs(t.values(j) - lam * u.values(j)) <= 1e-15 * lam * std::abs(u.values(j)));
  }
  const Eigen::VectorXcd fd = dtn_richardson(u, params);
  CHECK((fd - t.values).norm() < 1e-9 * t.values.norm());
  CHECK((extension_slice(u, 0.0, params) - u.values).norm() == 0.0);
  CHECK_THROWS_AS(dtn_richardson(u, params, 0.0), DomainError);
}

TEST_CASE("two energy routes agree") {
  const PhysParams params;
  const RadialGrid grid = build_grid(80, 1.0);
  const BoundaryFunction u = gaussian_datum(grid);
  const XGrid x = XGrid::for_params(params);
  const EnergyResult field = dirichlet_energy(extend(u, x, params), params);
  const EnergyResult formula = dirichlet_energy(u, params);
  CHECK(field.warnings.empty());
  CHECK(field.value == doctest::Approx(formula.value).epsilon(1e-12));
  const XGrid short_x = XGrid::geometric(1.0 / params.rest_energy());
  CHECK_FALSE(dirichlet_energy(extend(u, short_x, params), params).warnings.empty());
}

TEST_CASE("trace margin of exponential extensions has a closed form") {
  // per momentum: |u|^2 (r/2 + m^2c^4/(2r) - mc^2) = |u|^2 (r - mc^2)^2 / (2r)
  const PhysParams params;
  const double mc2 = params.rest_energy();
  const RadialGrid grid = build_grid(40, 1.0);
  const BoundaryFunction u = gaussian_datum(grid);
  const XGrid x = XGrid::for_params(params);
  std::vector<double> rate(grid.size());
  double expected = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    rate[j] = mc2 * (0.6 + 0.2 * static_cast<double>(j % 7));
    expected += grid.weights[j] * grid.nodes[j] * grid.nodes[j] *
                std::norm(u.values(static_cast<Eigen::Index>(j))) * (rate[j] - mc2) *
                (rate[j] - mc2) / (2 * rate[j]);
  }
  const ExtensionField phi = profile_field(u, x, rate);
  CHECK(trace_inequality_margin(phi, params) == doctest::Approx(expected).epsilon(1e-10));
  const ExtensionField eq = profile_field(u, x, std::vector<double>(grid.size(), mc2));
  CHECK(std::abs(trace_inequality_margin(eq, params)) < 1e-12 * trace_inequality_scale(eq, params));
}

TEST_CASE("minimality rejects perturbations with nonzero trace") {
  const PhysParams params;
  const RadialGrid grid = build_grid(40, 1.0);
  const BoundaryFunction u = gaussian_datum(grid);
  const ExtensionField bad = extend(u, XGrid::for_params(params), params);
  CHECK_THROWS_AS(minimality_check(u, bad, 1.0, params), DomainError);
}

TEST_CASE("consistency sweep on a small sample") {
  DtnCheckOptions o;
  o.n = 60;
  o.samples = 3;
  o.perturbations = 5;
  const DtnCheckReport r = dtn_consistency_check(o, PhysParams{});
  CHECK(r.energy_rel_diff.size() == 3);
  CHECK(r.minimality_gap.size() == 5);
  for (double v : r.energy_rel_diff) CHECK(v < 1e-7);
  for (double v : r.richardson_rel) CHECK(v < 1e-8);
  for (double v : r.minimality_gap) CHECK(v >= 0.0);
  for (double v : r.cross_term_rel) CHECK(v < 1e-10);
  for (double v : r.trace_margin_rel) CHECK(v >= 0.0);
  CHECK(r.equality_margin_rel < 1e-10);
}
