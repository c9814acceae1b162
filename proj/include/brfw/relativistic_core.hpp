#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

namespace brfw {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Matrix2c = Eigen::Matrix<cplx, 2, 2>;
using MomentumVector = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 137.035999084;

struct PhysParams {
  double c = kSpeedOfLight;
  double m = 1.0;
  double Z = 1.0;

  double rest_energy() const { return m * c * c; }
  /// Throws DomainError unless c > 0, m > 0, Z >= 0.
  void validate() const;
  /// Z/c below 2/(pi/2 + 2/pi).
  bool inside_tix_window() const;
};

struct SpinorMatrix4 {
  enum class Tag { general, hermitian, unitary };
  Matrix4c entries = Matrix4c::Zero();
  Tag tag = Tag::general;
};

double lambda_of(double p_mag, const PhysParams& params);
/// lambda(p) - mc^2 without cancellation.
double kinetic_excess(double p_mag, const PhysParams& params);
std::pair<double, double> a_plus_minus(double p_mag, const PhysParams& params);

const Matrix2c& pauli(int k);  // k = 0,1,2 for x,y,z
Matrix4c dirac_beta();
Matrix4c dirac_alpha(int k);
Matrix2c sigma_dot(const Eigen::Vector3d& v);

SpinorMatrix4 dirac_symbol(const MomentumVector& p, const PhysParams& params);
SpinorMatrix4 fw_unitary(const MomentumVector& p, const PhysParams& params,
                         bool inverse = false);
SpinorMatrix4 projector_symbol(const MomentumVector& p, int sign,
                               const PhysParams& params);
/// Upper 2x2 block of U(p) s U^{-1}(q), closed form.
Matrix2c fw_block_upper(const MomentumVector& p, const MomentumVector& q, cplx scalar,
                        const PhysParams& params);
/// U(p/R) - U((p-q)/R).
SpinorMatrix4 fw_difference_kernel(const MomentumVector& p, const MomentumVector& q,
                                   double R, const PhysParams& params);
/// Action of U(p) on the (upper, lower) radial pair of channel kappa.
Eigen::Matrix2d channel_rotation(double p_mag, int kappa, const PhysParams& params);

double max_abs(const Matrix4c& m);
double spectral_norm(const Matrix4c& m);

}  // namespace brfw
