#pragma once

#include <functional>
#include <vector>

namespace brfw {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached per n).
const GaussRule& gauss_legendre(int n);

using ScalarFn = std::function<double(double)>;

/// Adaptive integral over [a, b] (b may be +infinity). Endpoint singularities
/// are allowed. Throws NumericalError carrying the estimate when the error
/// estimate exceeds max(abs_tol, rel_tol*|I|).
double integrate_adaptive(const ScalarFn& f, double a, double b, double abs_tol = 1e-12,
                          double rel_tol = 1e-12);

/// Fixed composite Gauss-Legendre over [a, b] split into `panels` equal parts.
double integrate_gauss(const ScalarFn& f, double a, double b, int points, int panels = 1);

}  // namespace brfw
