#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brfw/radial_grid.hpp"
#include "brfw/relativistic_core.hpp"

namespace brfw {

/// Channel-reduced momentum datum u(p) sampled on a radial grid.
struct BoundaryFunction {
  RadialGrid grid;
  Eigen::VectorXcd values;

  static BoundaryFunction zero(const RadialGrid& grid);
  double l2_norm2() const;   // sum w p^2 |u|^2
  double h12_norm2() const;  // sum (1 + p) w p^2 |u|^2
  BoundaryFunction& operator+=(const BoundaryFunction& o);
  BoundaryFunction operator*(std::complex<double> a) const;
};

/// Composite Gauss rule on [0, x_max] with geometrically shrinking panels at 0.
struct XGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double x_max = 0.0;

  static XGrid geometric(double x_max, int panels = 50, int points = 8,
                         double first_fraction = 1e-12);
  /// Default for a rest energy: x_max = 40 / mc^2, 400 nodes.
  static XGrid for_params(const PhysParams& params);
  std::size_t size() const { return nodes.size(); }
};

/// v(x, p) on x-grid nodes (rows) and momentum nodes (columns), with dv/dx.
struct ExtensionField {
  BoundaryFunction boundary;
  XGrid x;
  Eigen::MatrixXcd values;
  Eigen::MatrixXcd dx;

  ExtensionField& operator+=(const ExtensionField& o);
  ExtensionField operator*(std::complex<double> a) const;
};

/// values(x, p) = u(p) exp(-lambda(p) x).
ExtensionField extend(const BoundaryFunction& u, const XGrid& x, const PhysParams& params);
/// Multiplier extension evaluated at a single x (any real x).
Eigen::VectorXcd extension_slice(const BoundaryFunction& u, double x, const PhysParams& params);

/// p -> lambda(p) u(p).
BoundaryFunction dtn_apply(const BoundaryFunction& u, const PhysParams& params);

/// -dv/dx at 0 from centered differences of the multiplier extension with steps
/// h/lambda(p) and h/(2 lambda(p)), combined by one Richardson step.
Eigen::VectorXcd dtn_richardson(const BoundaryFunction& u, const PhysParams& params,
                                double h = 1e-2);

enum class EnergyRoute { x_quadrature, momentum_formula };

struct EnergyResult {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// int dx int (|dv/dx|^2 + lambda^2 |v|^2) p^2 dp.
EnergyResult dirichlet_energy(const ExtensionField& field, const PhysParams& params,
                              double tail_tol = 1e-12);
/// int lambda(p) |u|^2 p^2 dp.
EnergyResult dirichlet_energy(const BoundaryFunction& u, const PhysParams& params);

/// (energy of the multiplier extension, energy with amplitude * perturbation added).
std::pair<double, double> minimality_check(const BoundaryFunction& u,
                                           const ExtensionField& perturbation,
                                           double amplitude, const PhysParams& params);

/// int dx int (|dv/dx|^2 + m^2c^4 |v|^2) p^2 dp - mc^2 ||v(0)||^2.
double trace_inequality_margin(const ExtensionField& phi, const PhysParams& params);
/// Scale for the margin tolerance: ||dv/dx||^2 + m^2c^4 ||v||^2.
double trace_inequality_scale(const ExtensionField& phi, const PhysParams& params);

/// Field u(p) exp(-rate(p) x) for an arbitrary positive rate profile.
ExtensionField profile_field(const BoundaryFunction& u, const XGrid& x,
                             const std::vector<double>& rate);

struct DtnCheckOptions {
  int n = 200;
  double s = 1.0;
  int samples = 20;
  int perturbations = 50;
  std::uint64_t seed = 7;
  int x_panels = 50;
  int x_points = 8;
  double richardson_step = 1e-2;
};

struct DtnCheckReport {
  std::vector<double> energy_rel_diff;    // per boundary datum, two-route energy disagreement
  std::vector<double> minimality_gap;     // per perturbation, (E(v + w) - E(v)) / E(v)
  std::vector<double> cross_term_rel;     // per perturbation, |E(v + w) - E(v) - E(w)| / E(v)
  std::vector<double> richardson_rel;     // per boundary datum
  std::vector<double> trace_margin_rel;   // per randomized extension, margin / scale
  double equality_margin_rel = 0.0;       // for the exp(-mc^2 x) extension
  std::vector<std::string> warnings;
};

/// Random Gaussian-mixture boundary data, zero-trace perturbations x exp(-mu x) g(p),
/// and exponential extensions with random per-momentum rates in [mc^2 / 2, 20 mc^2].
DtnCheckReport dtn_consistency_check(const DtnCheckOptions& options, const PhysParams& params);

}  // namespace brfw
