#include "brfw/relativistic_core.hpp"

#include <cmath>
#include <numbers>

#include "brfw/errors.hpp"

namespace brfw {

void PhysParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("m must be positive");
  if (!(Z >= 0.0) || !std::isfinite(Z)) throw DomainError("Z must be nonnegative");
}

bool PhysParams::inside_tix_window() const {
  constexpr double pi = std::numbers::pi;
  return Z / c < 2.0 / (pi / 2.0 + 2.0 / pi);
}

double lambda_of(double p_mag, const PhysParams& params) {
  if (p_mag < 0.0 || std::isnan(p_mag)) throw DomainError("negative momentum magnitude");
  const double mc2 = params.rest_energy();
  return std::hypot(params.c * p_mag, mc2);
}

double kinetic_excess(double p_mag, const PhysParams& params) {
  const double cp = params.c * p_mag;
  return cp * cp / (lambda_of(p_mag, params) + params.rest_energy());
}

std::pair<double, double> a_plus_minus(double p_mag, const PhysParams& params) {
  const double lam = lambda_of(p_mag, params);
  const double mc2 = params.rest_energy();
  // 1 - mc2/lam = (lam - mc2)/lam computed without cancellation
  const double minus = kinetic_excess(p_mag, params) / lam;
  const double plus = 1.0 + mc2 / lam;
  return {std::sqrt(0.5 * plus), std::sqrt(0.5 * minus)};
}

const Matrix2c& pauli(int k) {
  static const Matrix2c sx = (Matrix2c() << 0, 1, 1, 0).finished();
  static const Matrix2c sy = (Matrix2c() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  static const Matrix2c sz = (Matrix2c() << 1, 0, 0, -1).finished();
  if (k == 0) return sx;
  if (k == 1) return sy;
  return sz;
}

Matrix4c dirac_beta() {
  Matrix4c b = Matrix4c::Zero();
  b(0, 0) = b(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = -1.0;
  return b;
}

Matrix4c dirac_alpha(int k) {
  Matrix4c a = Matrix4c::Zero();
  a.block<2, 2>(0, 2) = pauli(k);
  a.block<2, 2>(2, 0) = pauli(k);
  return a;
}

Matrix2c sigma_dot(const Eigen::Vector3d& v) {
  return v.x() * pauli(0) + v.y() * pauli(1) + v.z() * pauli(2);
}

namespace {

Matrix4c alpha_dot(const Eigen::Vector3d& v) {
  return v.x() * dirac_alpha(0) + v.y() * dirac_alpha(1) + v.z() * dirac_alpha(2);
}

void check_finite(const MomentumVector& p) {
  if (!p.allFinite()) throw DomainError("non-finite momentum");
}

}  // namespace

SpinorMatrix4 dirac_symbol(const MomentumVector& p, const PhysParams& params) {
  check_finite(p);
  SpinorMatrix4 out;
  out.entries = params.c * alpha_dot(p) + params.rest_energy() * dirac_beta();
  out.tag = SpinorMatrix4::Tag::hermitian;
  return out;
}

SpinorMatrix4 fw_unitary(const MomentumVector& p, const PhysParams& params, bool inverse) {
  check_finite(p);
  SpinorMatrix4 out;
  out.tag = SpinorMatrix4::Tag::unitary;
  const double pm = p.norm();
  if (pm == 0.0) {
    out.entries = Matrix4c::Identity();
    return out;
  }
  auto [ap, am] = a_plus_minus(pm, params);
  const Matrix4c mix = dirac_beta() * alpha_dot(p / pm);
  out.entries = ap * Matrix4c::Identity() + (inverse ? -am : am) * mix;
  return out;
}

SpinorMatrix4 projector_symbol(const MomentumVector& p, int sign,
                               const PhysParams& params) {
  if (sign != 1 && sign != -1) throw DomainError("projector sign must be +1 or -1");
  const Matrix4c u = fw_unitary(p, params).entries;
  const Matrix4c uinv = fw_unitary(p, params, true).entries;
  const Matrix4c half = 0.5 * (Matrix4c::Identity() + double(sign) * dirac_beta());
  SpinorMatrix4 out;
  out.entries = uinv * half * u;
  out.tag = SpinorMatrix4::Tag::hermitian;
  return out;
}

Matrix2c fw_block_upper(const MomentumVector& p, const MomentumVector& q, cplx scalar,
                        const PhysParams& params) {
  check_finite(p);
  check_finite(q);
  const double pm = p.norm();
  const double qm = q.norm();
  if (pm == 0.0 || qm == 0.0) throw DomainError("fw_block_upper needs nonzero momenta");
  auto [ap, am] = a_plus_minus(pm, params);
  auto [aq, bq] = a_plus_minus(qm, params);
  Matrix2c out = ap * aq * Matrix2c::Identity() +
                 am * bq * sigma_dot(p / pm) * sigma_dot(q / qm);
  return scalar * out;
}

SpinorMatrix4 fw_difference_kernel(const MomentumVector& p, const MomentumVector& q,
                                   double R, const PhysParams& params) {
  if (!(R > 0.0)) throw DomainError("scale R must be positive");
  const MomentumVector d = p - q;
  if (p.norm() == 0.0 || d.norm() == 0.0)
    throw DomainError("fw_difference_kernel needs |p| > 0 and |p-q| > 0");
  SpinorMatrix4 out;
  out.entries = fw_unitary(p / R, params).entries - fw_unitary(d / R, params).entries;
  return out;
}

Eigen::Matrix2d channel_rotation(double p_mag, int kappa, const PhysParams& params) {
  if (kappa == 0) throw DomainError("kappa must be nonzero");
  auto [ap, am] = a_plus_minus(p_mag, params);
  Eigen::Matrix2d r;
  r << ap, -am, am, ap;
  return r;
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Matrix4c& m) {
  Eigen::JacobiSVD<Matrix4c> svd(m);
  return svd.singularValues()(0);
}

}  // namespace brfw
