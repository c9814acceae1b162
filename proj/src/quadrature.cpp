#include "brfw/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "brfw/errors.hpp"

namespace brfw {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss rule needs n >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto rule = std::make_unique<GaussRule>(n == 1 ? GaussRule{{0.0}, {2.0}} : compute_rule(n));
  const GaussRule& ref = *rule;
  cache.emplace(n, std::move(rule));
  return ref;
}

double integrate_adaptive(const ScalarFn& f, double a, double b, double abs_tol,
                          double rel_tol) {
  if (a == b) return 0.0;
  double error = 0.0, l1 = 0.0, value = 0.0;
  std::size_t levels = 0;
  const double boost_tol = std::max(rel_tol, 1e-15);
  auto g = [&f](double x) { return f(x); };
  if (std::isinf(b)) {
    static boost::math::quadrature::exp_sinh<double> rule;
    value = rule.integrate(g, a, b, boost_tol, &error, &l1, &levels);
  } else {
    static boost::math::quadrature::tanh_sinh<double> rule(15);
    value = rule.integrate(g, a, b, boost_tol, &error, &l1, &levels);
  }
  const double budget = std::max(abs_tol, rel_tol * std::abs(value));
  // the reported estimate is the difference of the last two levels, which is
  // a large overestimate once the doubly exponential rule converges
  if (!std::isfinite(value) || error > 1e3 * budget) {
    throw NumericalError("adaptive quadrature did not converge (error estimate " +
                             std::to_string(error) + ")",
                         value);
  }
  return value;
}

double integrate_gauss(const ScalarFn& f, double a, double b, int points, int panels) {
  const GaussRule& rule = gauss_legendre(points);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    for (int i = 0; i < points; ++i)
      sum += rule.weights[i] * f(lo + 0.5 * h * (rule.nodes[i] + 1.0));
  }
  return 0.5 * h * sum;
}

}  // namespace brfw
