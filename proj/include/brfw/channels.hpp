#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "brfw/radial_grid.hpp"
#include "brfw/relativistic_core.hpp"

namespace brfw {

struct ChannelSpec {
  int kappa = -1;
  int l_up = 0;
  int l_down = 1;
  double j = 0.5;

  static ChannelSpec from_kappa(int kappa);
};

inline constexpr int kMaxOrbital = 3;

/// Legendre function of the second kind for z > 1, l <= 3.
double legendre_q(int l, double z);
/// Same, parametrized by z - 1 > 0 (accurate near the singular point).
double legendre_q_offset(int l, double z_minus_one);

/// 2 pi * int_{-1}^{1} kernel(|p-q|) P_l(t) dt, adaptive.
double angular_reduce(const std::function<double(double)>& pointwise_kernel, int l,
                      double p, double q, double abs_tol = 1e-10);

/// -Z Q_l(z) / (pi p q), z = (p^2+q^2)/(2pq).
double coulomb_radial_kernel(int l, double p, double q, const PhysParams& params);

/// Sum over terms of coupling * f_t(p) f_t(q) Q_{l_t}(z) / (pi p q).
/// Covers the Coulomb channel kernels with arbitrary momentum-dependent factors.
struct RadialKernel {
  struct Term {
    int l = 0;
    std::function<double(double)> factor;
  };
  ChannelSpec channel;
  double coupling = 0.0;
  std::vector<Term> terms;
  bool log_singular = true;

  double operator()(double p, double q) const;
  /// Evaluation with z - 1 supplied by the caller.
  double eval_offset(double p, double q, double z_minus_one) const;
};

/// a+(p)a+(q) coulomb(l_up) + a-(p)a-(q) coulomb(l_down).
RadialKernel br_kernel(const ChannelSpec& channel, const PhysParams& params);
/// Coulomb kernel of channel l with factor 1 (the c -> inf limit).
RadialKernel nonrel_kernel(int l, double Z);
double br_channel_kernel(const ChannelSpec& channel, double p, double q,
                         const PhysParams& params);

struct ChiProfile {
  std::string kind = "gaussian";
};

/// e^{-a} i_l(a) for a >= 0.
double scaled_bessel_i(int l, double a);
/// Channel-l momentum kernel of multiplication by chi(|y|/R).
double multiplier_channel_kernel(const ChiProfile& profile, int l, double R, double p,
                                 double q);

enum class TransformDirection { forward, inverse };

/// sqrt(2/pi) sum_a w_a r_a^2 j_l(p r_a) f(r_a), evaluated at the nodes of out.
std::vector<double> spherical_bessel_transform(int l, const RadialGrid& in,
                                               const std::vector<double>& samples,
                                               const RadialGrid& out,
                                               TransformDirection direction =
                                                   TransformDirection::forward);
std::vector<double> spherical_bessel_transform(int l, const RadialGrid& grid,
                                               const std::vector<double>& samples,
                                               TransformDirection direction =
                                                   TransformDirection::forward);

/// Y_lm at direction n (Condon-Shortley phase).
std::complex<double> spherical_harmonic(int l, int m, const Eigen::Vector3d& n);
/// Two-component spinor harmonic Omega_{kappa, m} with m = two_m / 2.
Eigen::Vector2cd spherical_spinor(int kappa, int two_m, const Eigen::Vector3d& n);

}  // namespace brfw
