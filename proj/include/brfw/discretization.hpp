#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "brfw/channels.hpp"
#include "brfw/radial_grid.hpp"
#include "brfw/relativistic_core.hpp"

namespace brfw {

enum class Scheme { nystrom, galerkin };

inline constexpr int kDefaultGalerkinDegree = 3;

Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme s);

/// Grid recipe; the mapping scale defaults to the nuclear charge.
struct GridSpec {
  int n = 200;
  double s = 0.0;  // <= 0: use Z (falls back to 1 for Z = 0)
  GridMapping mapping = GridMapping::rational;
  double lower = 5.0;  // exponential: log offsets around log s
  double upper = 28.0;
  double grading = 1.0;
  double extent = 0.0;  // linear: upper end
  Scheme scheme = Scheme::nystrom;
  int degree = kDefaultGalerkinDegree;

  double scale_for(double Z) const { return s > 0.0 ? s : (Z > 0.0 ? Z : 1.0); }
  RadialGrid build(double Z) const;
  /// Galerkin, degree 5, graded log grid: resolves the slow momentum tail near Z_c.
  static GridSpec strong_coupling(int n);
};

GridMapping mapping_from_string(const std::string& name);
std::string to_string(GridMapping m);

/// Channel operator as a symmetric pencil (kinetic + potential, gram).
///
/// Nystrom: basis e_i = delta_i / sqrt(w_i p_i^2), gram = identity.
/// Galerkin: continuous piecewise polynomials interpolating at the grid nodes
/// (plus continuation points past the last node), gram = mass matrix.
struct DiscreteOperator {
  Scheme scheme = Scheme::nystrom;
  RadialGrid grid;
  ChannelSpec channel;
  PhysParams params;
  Eigen::MatrixXd kinetic_excess;  // lambda(p) - mc^2
  Eigen::MatrixXd potential;
  Eigen::MatrixXd gram;
  std::vector<std::string> warnings;
  int degree = 0;                   // Galerkin polynomial degree
  std::vector<double> basis_nodes;  // interpolation nodes of the basis
  Eigen::VectorXd basis_scale;      // nodal value = coefficient * scale

  Eigen::Index size() const { return potential.rows(); }
  double shift() const { return params.rest_energy(); }
  Eigen::MatrixXd kinetic() const { return kinetic_excess + shift() * gram; }
  Eigen::MatrixXd matrix() const { return kinetic() + potential; }
  /// matrix() - mc^2 gram, assembled without cancellation.
  Eigen::MatrixXd shifted_matrix() const { return kinetic_excess + potential; }
  bool identity_gram() const { return scheme == Scheme::nystrom; }
  Eigen::VectorXd l2_weights() const;
  /// Function values at the grid nodes for basis coefficients.
  Eigen::VectorXd nodal_values(const Eigen::VectorXd& coeffs) const;
  /// Basis coefficients of a function known at the grid nodes.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& nodal) const;
};

/// int_0^inf k(p,q) * 2p^2/(p^2+q^2) * q^2 dq.
double subtraction_integral(const RadialKernel& kernel, double p, double tol = 1e-12);

/// Matrix of the form (f, K f) in the scheme's basis.
Eigen::MatrixXd assemble_kernel_form(const RadialGrid& grid, const RadialKernel& kernel,
                                     Scheme scheme, int degree = kDefaultGalerkinDegree);
/// Matrix of (f, w(p) f) in the scheme's basis.
Eigen::MatrixXd assemble_weight_form(const RadialGrid& grid,
                                     const std::function<double(double)>& weight,
                                     Scheme scheme, int degree = kDefaultGalerkinDegree);
/// Interpolation nodes of the Galerkin basis built on grid.
std::vector<double> galerkin_nodes(const RadialGrid& grid, int degree);

DiscreteOperator assemble_operator(const RadialGrid& grid, const ChannelSpec& channel,
                                   const PhysParams& params, Scheme scheme = Scheme::nystrom,
                                   int degree = kDefaultGalerkinDegree);
DiscreteOperator assemble_operator(const GridSpec& spec, const ChannelSpec& channel,
                                   const PhysParams& params);
/// Same with an explicit potential kernel.
DiscreteOperator assemble_operator(const RadialGrid& grid, const RadialKernel& kernel,
                                   const PhysParams& params, Scheme scheme,
                                   int degree = kDefaultGalerkinDegree);

struct MetricH12 {
  Eigen::VectorXd diagonal;
};

/// (1 + p_i) w_i p_i^2.
MetricH12 assemble_h12_metric(const RadialGrid& grid);
/// Largest singular value of D^{1/2} A D^{-1/2}.
double operator_norm_h12(const Eigen::MatrixXd& A, const MetricH12& metric);

}  // namespace brfw
