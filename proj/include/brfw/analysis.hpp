#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brfw/channels.hpp"
#include "brfw/discretization.hpp"
#include "brfw/relativistic_core.hpp"

namespace brfw {

namespace constants {
inline constexpr double kHardy = 2.0;
inline constexpr double kKato = 1.5707963267948966;  // pi / 2
inline constexpr double kTix = 0.5 * (1.5707963267948966 + 0.63661977236758134);
inline constexpr double kCriticalCharge = 124.0;
}  // namespace constants

struct InequalityReport {
  std::string name;
  std::string family;
  double max_ratio = 0.0;
  double theoretical_constant = 0.0;
  double margin = 0.0;  // constant - max_ratio
  std::size_t sample_count = 0;
  std::vector<std::string> labels;
  std::vector<double> ratios;

  bool within_bound() const { return max_ratio <= theoretical_constant * (1.0 + 1e-9); }
};

/// ||psi / r|| / ||grad psi|| for psi = r^alpha e^{-r}, alpha > -1/2, by quadrature.
double hardy_ratio(double alpha);
InequalityReport hardy_check(const std::vector<double>& alphas = {0.0, -0.1, -0.2, -0.3, -0.35,
                                                                  -0.4, -0.42});

/// Grid for the Kato/Tix sups: piecewise-linear Galerkin on the rational map.
GridSpec inequality_grid(int n = 300, double s = 1.0);
/// Largest ratio (f, |x|^-1 f) / (f, |p| f) in channel l = 0.
InequalityReport kato_check(const GridSpec& grid = inequality_grid());
/// Largest ratio of the projected |x|^-1 form against (f, lambda(p)/c f) over channels.
InequalityReport tix_check(const std::vector<int>& kappas = {-1, 1}, const PhysParams& params = {},
                           int n = 300);

struct CriticalRow {
  double Z = 0.0;
  std::vector<int> n_values;
  std::vector<double> lambda1;  // in units of mc^2
  double variation = 0.0;       // max - min, units of mc^2
  double drop = 0.0;            // first - last, units of mc^2
  bool stable = false;          // positive and variation < tolerance
  bool collapsing = false;      // monotone drop larger than collapse threshold
};

struct CriticalScanOptions {
  std::vector<double> Z_values{60.0, 120.0, 130.0};
  std::vector<int> n_values{100, 200, 400};
  double stability_tol = 1e-4;   // units of mc^2
  double collapse_drop = 0.05;   // units of mc^2
  double cutoff_growth = 2.0;    // upper log cutoff grows by this times log(n / n_first)
  int kappa = -1;
};

/// lambda_1 under simultaneous refinement of resolution and momentum cutoff.
std::vector<CriticalRow> critical_coupling_scan(const CriticalScanOptions& options = {},
                                                const PhysParams& base = {});

struct CommutatorDecayReport {
  std::vector<double> R_values;
  std::vector<double> norms;
  double fitted_slope = 0.0;
  double fit_residual = 0.0;  // rms of log residuals
  bool flagged = false;
};

struct CommutatorOptions {
  std::vector<double> R_values{2, 4, 8, 16, 32, 64};
  int n = 160;
  double s = 1.0;
  int kappa = -1;
  ChiProfile profile;
};

/// Matrix of [chi_R, U^-1] U on the (upper, lower) nodal pair space.
Eigen::MatrixXd commutator_matrix(const RadialGrid& grid, const ChannelSpec& channel,
                                  const ChiProfile& profile, double R, const PhysParams& params);
CommutatorDecayReport commutator_decay(const CommutatorOptions& options = {},
                                       const PhysParams& params = {});

struct ScalingLimitReport {
  std::vector<double> eta_values;
  std::vector<double> form_values;
  double leading_coefficient = 0.0;
  double reference_coefficient = 0.0;  // Z (phi, |y|^-1 phi)
  double remainder_coefficient = 0.0;
  double remainder_exponent = 0.0;
  bool flagged = false;
};

struct ScalingOptions {
  std::vector<double> eta_values{0.5, 0.35, 0.25, 0.18, 0.125, 0.09, 0.0625, 0.045, 0.03125};
  int n = 200;
  double Z = 1.0;
  int kappa = -1;
};

/// (phi_eta, V_FW phi_eta) for the unit Gaussian phi, phi_eta = eta^{3/2} phi(eta y).
ScalingLimitReport scaling_limit(const ScalingOptions& options = {}, PhysParams params = {});
/// (phi, |y|^-1 phi) for the unit Gaussian by position-space quadrature.
double gaussian_inverse_radius_moment();

struct AlgebraScan {
  std::size_t samples = 0;
  double unitarity = 0.0;        // max ||U U* - I||_max
  double diagonalization = 0.0;  // max ||U D U^-1 - beta lambda||_max / lambda
  double projector = 0.0;        // max projector algebra residual
  double block_form = 0.0;       // max closed form vs 4x4 block deviation
};
AlgebraScan fw_algebra_scan(std::size_t samples, std::uint64_t seed,
                            const PhysParams& params = {});

struct BoundScan {
  std::size_t samples = 0;
  double kernel_ratio = 0.0;   // max ||K_R|| mcR / (5 sqrt2 |q|)
  double a_plus_ratio = 0.0;   // max |a_+(eta p) - 1| 2m^2c^2 / (eta^2 p^2)
  double a_minus_ratio = 0.0;  // max a_-(eta p) sqrt2 mc / (eta p)
};
BoundScan pointwise_bound_scan(std::size_t samples, std::uint64_t seed,
                              const PhysParams& params = {});

}  // namespace brfw
