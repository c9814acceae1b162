#include "doctest.h"

#include <cmath>
#include <numbers>

#include "brfw/analysis.hpp"

using namespace brfw;

namespace {

// ||psi/r|| / ||psi'|| for psi = r^a e^{-r} from Gamma-function moments.
double hardy_oracle(double a) {
  auto m = [](double k) { return std::tgamma(k + 1) / std::pow(2.0, k + 1); };
  const double inv = m(2 * a);
  const double grad = a * a * m(2 * a) - 2 * a * m(2 * a + 1) + m(2 * a + 2);
  return std::sqrt(inv / grad);
}

}  // namespace

TEST_CASE("constants") {
  CHECK(constants::kKato == doctest::Approx(std::numbers::pi / 2).epsilon(1e-16));
  CHECK(constants::kTix == doctest::Approx(1.103708).epsilon(1e-6));
  CHECK(constants::kHardy == 2.0);
}

TEST_CASE("Hardy ratio matches the Gamma-function oracle") {
  for (double a : {0.0, -0.2, -0.4, -0.45, 1.5}) CHECK(hardy_ratio(a) == doctest::Approx(hardy_oracle(a)).epsilon(1e-9));
  const InequalityReport r = hardy_check();
  CHECK(r.within_bound());
  CHECK(r.max_ratio > 1.8);
  CHECK(r.margin == doctest::Approx(2.0 - r.max_ratio));
  CHECK(r.sample_count == 7);
}

TEST_CASE("property: Hardy ratio grows as the family concentrates") {
  double prev = 0.0;
  for (double a = 1.0; a > -0.49; a -= 0.1) {
    const double r = hardy_ratio(a);
    CHECK(r > prev);
    CHECK(r < 2.0);
    prev = r;
  }
}

TEST_CASE("Kato and Tix sups approach their constants from below") {
  const InequalityReport kato = kato_check(inequality_grid(150));
  CHECK(kato.within_bound());
  CHECK(kato.max_ratio > 1.45);
  const InequalityReport tix = tix_check({-1}, PhysParams{}, 150);
  CHECK(tix.within_bound());
  CHECK(tix.max_ratio > 1.0);
}

TEST_CASE("Gaussian inverse-radius moment is 2/sqrt(pi)") {
  CHECK(gaussian_inverse_radius_moment() == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("FW algebra and pointwise bound scans") {
  const AlgebraScan a = fw_algebra_scan(200, 3);
  CHECK(a.samples == 200);
  CHECK(a.unitarity < 1e-12);
  CHECK(a.diagonalization < 1e-11);
  CHECK(a.projector < 1e-12);
  CHECK(a.block_form < 1e-12);
  const BoundScan b = pointwise_bound_scan(500, 4);
  CHECK(b.kernel_ratio <= 1.0 + 1e-10);
  CHECK(b.a_plus_ratio <= 1.0 + 1e-10);
  CHECK(b.a_minus_ratio <= 1.0 + 1e-10);
  CHECK(b.a_minus_ratio > 0.5);
}

TEST_CASE("commutator norm decreases with the cutoff radius") {
  const RadialGrid grid = build_grid(60, 1.0);
  const PhysParams params;
  const ChannelSpec ch = ChannelSpec::from_kappa(-1);
  double prev = 1e300;
  for (double R : {2.0, 8.0, 32.0}) {
    const Eigen::MatrixXd C = commutator_matrix(grid, ch, ChiProfile{}, R, params);
    CHECK(C.rows() == 120);
    const double norm = C.norm();
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("critical scan separates stable and collapsing charges") {
  CriticalScanOptions o;
  o.Z_values = {60.0, 130.0};
  o.n_values = {100, 200};
  const auto rows = critical_coupling_scan(o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].stable);
  CHECK(rows[0].lambda1.back() == doctest::Approx(0.8970012).epsilon(1e-6));
  CHECK_FALSE(rows[0].collapsing);
  CHECK(rows[1].collapsing);
  CHECK_FALSE(rows[1].stable);
}

TEST_CASE("scaling limit leading coefficient") {
  ScalingOptions o;
  o.eta_values = {0.25, 0.125, 0.0625, 0.03125};
  const ScalingLimitReport r = scaling_limit(o);
  CHECK(r.reference_coefficient == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(r.leading_coefficient == doctest::Approx(r.reference_coefficient).epsilon(0.02));
  for (double f : r.form_values) CHECK(f < 0.0);
}
