#include "brfw/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brfw/errors.hpp"
#include "brfw/quadrature.hpp"

namespace brfw {

std::string RadialGrid::describe() const {
  std::ostringstream os;
  os << (mapping == GridMapping::rational      ? "rational"
         : mapping == GridMapping::exponential ? "exponential"
                                               : "linear")
     << " n=" << nodes.size() << " s=" << mapping_scale;
  if (mapping == GridMapping::exponential)
    os << " lower=" << lower << " upper=" << extent << " grading=" << grading;
  if (mapping == GridMapping::linear) os << " extent=" << extent;
  return os.str();
}

std::vector<double> RadialGrid::l2_weights() const {
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = weights[i] * nodes[i] * nodes[i];
  return out;
}

namespace {
void check_args(int n, double s) {
  if (n < 16) throw ConfigError("grid.n", "n >= 16 required");
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("grid.s", "scale must be positive");
}
}  // namespace

RadialGrid build_grid(int n, double s) {
  check_args(n, s);
  const GaussRule& rule = gauss_legendre(n);
  RadialGrid g;
  g.mapping_scale = s;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    g.nodes[i] = s * (1.0 + t) / (1.0 - t);
    g.weights[i] = rule.weights[i] * 2.0 * s / ((1.0 - t) * (1.0 - t));
  }
  return g;
}

RadialGrid build_grid_exponential(int n, double s, double lower, double upper,
                                  double grading) {
  check_args(n, s);
  if (!(lower > 0.0) || !(upper > 0.0))
    throw ConfigError("grid.log_range", "log offsets must be positive");
  if (!(grading >= 0.0)) throw ConfigError("grid.grading", "grading must be >= 0");
  const GaussRule& rule = gauss_legendre(n);
  RadialGrid g;
  g.mapping = GridMapping::exponential;
  g.mapping_scale = s;
  g.extent = upper;
  g.lower = lower;
  g.grading = grading;
  g.nodes.resize(n);
  g.weights.resize(n);
  // y(t) = b sinh(beta (t - t0)) with y(-1) = -lower, y(1) = upper
  const double beta = std::max(grading, 1e-6);
  const double ratio = upper / lower;
  double lo = -1.0 + 1e-12, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = std::sinh(beta * (1.0 - mid)) / std::sinh(beta * (1.0 + mid));
    (r > ratio ? lo : hi) = mid;
  }
  const double t0 = 0.5 * (lo + hi);
  const double b = upper / std::sinh(beta * (1.0 - t0));
  for (int i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    const double y = b * std::sinh(beta * (t - t0));
    const double dy = b * beta * std::cosh(beta * (t - t0));
    g.nodes[i] = s * std::exp(y);
    g.weights[i] = rule.weights[i] * dy * g.nodes[i];
  }
  return g;
}

RadialGrid build_grid_linear(int n, double upper) {
  check_args(n, upper);
  const GaussRule& rule = gauss_legendre(n);
  RadialGrid g;
  g.mapping = GridMapping::linear;
  g.mapping_scale = upper;
  g.extent = upper;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    g.nodes[i] = 0.5 * upper * (rule.nodes[i] + 1.0);
    g.weights[i] = 0.5 * upper * rule.weights[i];
  }
  return g;
}

}  // namespace brfw
