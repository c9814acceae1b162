#pragma once

#include <string>
#include <vector>

namespace brfw {

enum class GridMapping { rational, exponential, linear };

/// Quadrature nodes/weights for integrals over (0, inf) dp (or a finite interval
/// for the linear mapping).
struct RadialGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double mapping_scale = 1.0;
  GridMapping mapping = GridMapping::rational;
  double extent = 0.0;   // upper log offset for exponential, upper end for linear
  double lower = 0.0;    // lower log offset for exponential
  double grading = 0.0;  // sinh grading for exponential

  std::size_t size() const { return nodes.size(); }
  std::string describe() const;
  /// Node weights of the radial measure p^2 dp.
  std::vector<double> l2_weights() const;
};

/// p = s(1+t)/(1-t) on Gauss-Legendre nodes t.
RadialGrid build_grid(int n, double s);
/// p = s exp(y(t)) with y(t) = b sinh(grading (t - t0)) running from -lower to
/// upper; grading -> 0 gives log-uniform spacing, larger values concentrate
/// nodes near p = s.
RadialGrid build_grid_exponential(int n, double s, double lower, double upper,
                                  double grading = 1.0);
/// Plain Gauss-Legendre on [0, upper].
RadialGrid build_grid_linear(int n, double upper);

}  // namespace brfw
