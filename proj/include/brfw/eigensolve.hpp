#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "brfw/discretization.hpp"

namespace brfw {

enum class SolverRoute { dense, variational };
std::string to_string(SolverRoute r);

/// Eigenvalues below mc^2 (1 - 1e-9) count as bound states.
inline constexpr double kBoundStateMargin = 1e-9;

struct MinimizationTrace {
  std::vector<double> energies;        // Rayleigh quotient after each accepted step
  std::vector<double> gradient_norms;  // projected residual norm per step
  std::vector<double> multipliers;     // Rayleigh quotient used as the multiplier estimate
  bool converged = false;
};

struct SpectralResult {
  std::vector<double> eigenvalues;           // ascending
  std::vector<Eigen::VectorXd> eigenvectors; // basis coefficients, unit in the gram metric
  std::vector<double> residuals;
  std::vector<bool> bound;
  std::vector<MinimizationTrace> traces;  // variational route only
  ChannelSpec channel;
  PhysParams params;
  SolverRoute route = SolverRoute::dense;
  std::string grid_meta;
  std::vector<std::string> warnings;

  std::size_t bound_count() const;
};

/// k smallest eigenvalues of the pencil (A, B) for symmetric A and SPD B.
/// When A is positive definite the inverse pencil is diagonalized instead,
/// which keeps relative accuracy across the spread of scales in A.
struct PencilEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // B-orthonormal columns
  bool inverted = false;
};
PencilEigen lowest_pencil_eigen(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k);
/// Largest generalized eigenvalue of (A, B) for SPD B.
double largest_pencil_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

SpectralResult dense_spectrum(const DiscreteOperator& op, int k);

struct MinimizeOptions {
  double tol = 1e-10;  // projected residual norm, energy units
  int max_iter = 20000;
};

struct MinimizerResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;
  MinimizationTrace trace;
};

/// Deflated constrained minimization of the Rayleigh energy (f, Af) over unit
/// vectors orthogonal to `prior`.
MinimizerResult minimize_pk(const DiscreteOperator& op, int k,
                            const std::vector<Eigen::VectorXd>& prior,
                            const MinimizeOptions& options = {});
SpectralResult variational_spectrum(const DiscreteOperator& op, int k,
                                    const MinimizeOptions& options = {});

/// ||(A - lambda B) f||_{B^-1} / ||f||_B for eigenpair `index`.
double neumann_residual(const DiscreteOperator& op, const SpectralResult& result,
                        std::size_t index);
double neumann_residual(const DiscreteOperator& op, const Eigen::VectorXd& f, double lambda);

/// Eigenvalues of p^2/2m plus the Coulomb channel kernel with a_+ = 1.
std::vector<double> nonrel_spectrum(const RadialGrid& grid, double Z, int l, int k,
                                    Scheme scheme = Scheme::nystrom,
                                    int degree = kDefaultGalerkinDegree, double mass = 1.0);

struct BindingRow {
  double Z = 0.0;
  std::vector<double> eigenvalues;
  std::vector<double> binding;  // mc^2 - lambda_j
  std::size_t bound = 0;
  std::vector<std::string> warnings;
};

std::vector<BindingRow> binding_curve(const std::vector<double>& Z_values,
                                      const ChannelSpec& channel, int k, const GridSpec& grid,
                                      PhysParams base = {});

}  // namespace brfw
