#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "brfw/errors.hpp"
#include "brfw/quadrature.hpp"
#include "brfw/radial_grid.hpp"

using namespace brfw;

TEST_CASE("Gauss-Legendre rules are exact to degree 2n-1") {
  for (int n : {1, 4, 8, 17}) {
    const GaussRule& r = gauss_legendre(n);
    double w = 0.0, top = 0.0;
    for (int i = 0; i < n; ++i) {
      w += r.weights[i];
      top += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    for (int i = 1; i < n; ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }
}

TEST_CASE("adaptive quadrature with endpoint singularities and infinite ranges") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, inf) ==
        doctest::Approx(1.0).epsilon(1e-11));
  CHECK(integrate_adaptive([](double x) { return std::log(x); }, 0.0, 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-11));
  CHECK(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate_gauss([](double x) { return std::cos(x); }, 0.0, std::numbers::pi / 2, 10, 4) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("radial grids integrate Gaussian moments") {
  const double exact = std::sqrt(std::numbers::pi) / 4.0;
  auto moment = [](const RadialGrid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      s += g.weights[i] * g.nodes[i] * g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i]);
    return s;
  };
  CHECK(moment(build_grid(100, 1.0)) == doctest::Approx(exact).epsilon(1e-12));
  // the exponential grid starts at p = e^-5; the uncovered piece is e^-15 / 3
  CHECK(moment(build_grid_exponential(200, 1.0, 5.0, 28.0)) ==
        doctest::Approx(exact - std::exp(-15.0) / 3.0).epsilon(1e-10));
  CHECK(moment(build_grid_linear(60, 12.0)) == doctest::Approx(exact).epsilon(1e-12));
  const RadialGrid g = build_grid(50, 2.0);
  const auto l2 = g.l2_weights();
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(l2[i] == doctest::Approx(g.weights[i] * g.nodes[i] * g.nodes[i]));
}

TEST_CASE("rational grid nodes are positive, ascending and centred on the scale") {
  const RadialGrid g = build_grid(64, 3.0);
  CHECK(g.nodes.front() > 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  CHECK(g.nodes[31] * g.nodes[32] == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("invalid exponential grid parameters") {
  CHECK_THROWS_AS(build_grid_exponential(100, 1.0, -1.0, 10.0), ConfigError);
  CHECK_THROWS_AS(build_grid_exponential(100, 1.0, 5.0, 10.0, -1.0), ConfigError);
}
