#include "brfw/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brfw/errors.hpp"
#include "brfw/quadrature.hpp"

namespace brfw {

namespace {
constexpr double kPi = std::numbers::pi;

int orbital_of(int kappa) { return kappa > 0 ? kappa : -kappa - 1; }

double legendre_p(int l, double t) {
  double p0 = 1.0, p1 = t;
  if (l == 0) return p0;
  for (int k = 2; k <= l; ++k) {
    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Hypergeometric series in 1/z^2, fast for z >= 2.
double legendre_q_series(int l, double z) {
  const double a = 0.5 * (l + 1), b = 0.5 * (l + 2), c = l + 1.5;
  const double x = 1.0 / (z * z);
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 200; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  const double pref = std::sqrt(kPi) * std::exp(std::lgamma(l + 1.0) - std::lgamma(l + 1.5));
  return pref / std::pow(2.0 * z, l + 1) * sum;
}
}  // namespace

ChannelSpec ChannelSpec::from_kappa(int kappa) {
  if (kappa == 0) throw DomainError("kappa must be nonzero");
  if (std::abs(kappa) > kMaxOrbital) throw DomainError("|kappa| <= 3 supported");
  ChannelSpec ch;
  ch.kappa = kappa;
  ch.l_up = orbital_of(kappa);
  ch.l_down = orbital_of(-kappa);
  ch.j = std::abs(kappa) - 0.5;
  return ch;
}

double legendre_q_offset(int l, double zm1) {
  if (l < 0 || l > kMaxOrbital) throw DomainError("legendre_q supports 0 <= l <= 3");
  if (!(zm1 > 0.0)) throw DomainError("legendre_q needs z > 1");
  const double z = 1.0 + zm1;
  if (zm1 > 1.0) return legendre_q_series(l, z);
  const double q0 =
      zm1 < 1e-3 ? 0.5 * (std::log(2.0 + zm1) - std::log(zm1)) : 0.5 * std::log1p(2.0 / zm1);
  switch (l) {
    case 0:
      return q0;
    case 1:
      return z * q0 - 1.0;
    case 2:
      return 0.5 * (3.0 * z * z - 1.0) * q0 - 1.5 * z;
    default:
      return 0.5 * (5.0 * z * z * z - 3.0 * z) * q0 - 2.5 * z * z + 2.0 / 3.0;
  }
}

double legendre_q(int l, double z) {
  if (!(z > 1.0)) throw DomainError("legendre_q needs z > 1");
  return legendre_q_offset(l, z - 1.0);
}

double angular_reduce(const std::function<double(double)>& pointwise_kernel, int l,
                      double p, double q, double abs_tol) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("angular_reduce needs p, q > 0");
  // integrate in s = 1 - t so the near-coincident end keeps full precision
  auto f = [&](double s) {
    const double d2 = (p - q) * (p - q) + 2.0 * p * q * s;
    return pointwise_kernel(std::sqrt(d2)) * legendre_p(l, 1.0 - s);
  };
  return 2.0 * kPi * integrate_adaptive(f, 0.0, 2.0, abs_tol, 1e-13);
}

double coulomb_radial_kernel(int l, double p, double q, const PhysParams& params) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("kernel needs p, q > 0");
  if (p == q) throw SingularPointError("Coulomb kernel evaluated at p = q");
  const double zm1 = (p - q) * (p - q) / (2.0 * p * q);
  return -params.Z * legendre_q_offset(l, zm1) / (kPi * p * q);
}

double RadialKernel::eval_offset(double p, double q, double zm1) const {
  double sum = 0.0;
  for (const auto& t : terms) {
    const double fp = t.factor(p);
    const double fq = t.factor(q);
    if (fp == 0.0 || fq == 0.0) continue;
    sum += fp * fq * legendre_q_offset(t.l, zm1);
  }
  return coupling * sum / (kPi * p * q);
}

double RadialKernel::operator()(double p, double q) const {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("kernel needs p, q > 0");
  if (p == q) throw SingularPointError("channel kernel evaluated at p = q");
  return eval_offset(p, q, (p - q) * (p - q) / (2.0 * p * q));
}

RadialKernel br_kernel(const ChannelSpec& channel, const PhysParams& params) {
  RadialKernel k;
  k.channel = channel;
  k.coupling = -params.Z;
  k.terms.push_back({channel.l_up, [params](double p) { return a_plus_minus(p, params).first; }});
  k.terms.push_back(
      {channel.l_down, [params](double p) { return a_plus_minus(p, params).second; }});
  return k;
}

RadialKernel nonrel_kernel(int l, double Z) {
  RadialKernel k;
  k.channel = ChannelSpec::from_kappa(-(l + 1));
  k.coupling = -Z;
  k.terms.push_back({l, [](double) { return 1.0; }});
  return k;
}

double br_channel_kernel(const ChannelSpec& channel, double p, double q,
                         const PhysParams& params) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("kernel needs p, q > 0");
  if (p == q) throw SingularPointError("channel kernel evaluated at p = q");
  auto [ap, am] = a_plus_minus(p, params);
  auto [aq, bq] = a_plus_minus(q, params);
  return ap * aq * coulomb_radial_kernel(channel.l_up, p, q, params) +
         am * bq * coulomb_radial_kernel(channel.l_down, p, q, params);
}

double scaled_bessel_i(int l, double a) {
  if (l < 0 || l > kMaxOrbital) throw DomainError("scaled_bessel_i supports l <= 3");
  if (a < 0.0) throw DomainError("scaled_bessel_i needs a >= 0");
  if (a <= 5.0) {
    double lead = 1.0;
    for (int k = 1; k <= l; ++k) lead *= a / (2.0 * k + 1.0);
    const double x = 0.5 * a * a;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= x / (k * (2.0 * l + 2.0 * k + 1.0));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(-a) * lead * sum;
  }
  const double e2 = std::exp(-2.0 * a);
  double im = (1.0 + e2) / (2.0 * a);  // scaled i_{-1} = cosh/a
  double i0 = (1.0 - e2) / (2.0 * a);
  if (l == 0) return i0;
  for (int k = 0; k < l; ++k) {
    double next = im - (2.0 * k + 1.0) / a * i0;
    im = i0;
    i0 = next;
  }
  return i0;
}

double multiplier_channel_kernel(const ChiProfile& profile, int l, double R, double p,
                                 double q) {
  if (profile.kind != "gaussian")
    throw ConfigError("commutator.profile", "unsupported cutoff profile '" + profile.kind + "'");
  if (!(R > 0.0)) throw DomainError("R must be positive");
  const double a = R * R * p * q;
  const double d = R * (p - q);
  return std::sqrt(2.0 / kPi) * R * R * R * std::exp(-0.5 * d * d) * scaled_bessel_i(l, a);
}

namespace {

// Closed forms above x = 4, where std::sph_bessel gives up for large arguments.
double spherical_j(int l, double x) {
  if (x < 4.0) return std::sph_bessel(static_cast<unsigned>(l), x);
  const double s = std::sin(x), c = std::cos(x), ix = 1.0 / x;
  switch (l) {
    case 0: return s * ix;
    case 1: return (s * ix - c) * ix;
    case 2: return ((3.0 * ix * ix - 1.0) * s - 3.0 * c * ix) * ix;
    case 3: return ((15.0 * ix * ix - 6.0) * ix * s - (15.0 * ix * ix - 1.0) * c) * ix;
    default: throw DomainError("spherical Bessel transform supports l <= 3");
  }
}

}  // namespace

std::vector<double> spherical_bessel_transform(int l, const RadialGrid& in,
                                               const std::vector<double>& samples,
                                               const RadialGrid& out,
                                               TransformDirection) {
  if (samples.size() != in.size()) throw DomainError("sample count does not match grid");
  std::vector<double> res(out.size(), 0.0);
  const double pref = std::sqrt(2.0 / kPi);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < in.size(); ++a) {
      if (samples[a] == 0.0) continue;
      const double r = in.nodes[a];
      s += in.weights[a] * r * r * spherical_j(l, out.nodes[i] * r) * samples[a];
    }
    res[i] = pref * s;
  }
  return res;
}

std::vector<double> spherical_bessel_transform(int l, const RadialGrid& grid,
                                               const std::vector<double>& samples,
                                               TransformDirection direction) {
  return spherical_bessel_transform(l, grid, samples, grid, direction);
}

std::complex<double> spherical_harmonic(int l, int m, const Eigen::Vector3d& n) {
  if (std::abs(m) > l) return 0.0;
  const double theta = std::acos(std::clamp(n.z() / n.norm(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  const int am = std::abs(m);
  const std::complex<double> y =
      std::sph_legendre(l, am, theta) * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

Eigen::Vector2cd spherical_spinor(int kappa, int two_m, const Eigen::Vector3d& n) {
  const int l = orbital_of(kappa);
  const double mj = 0.5 * two_m;
  const double denom = 2.0 * l + 1.0;
  // m -+ 1/2 as integers
  const int m_lo = (two_m - 1) / 2;
  const int m_hi = (two_m + 1) / 2;
  Eigen::Vector2cd out;
  if (kappa < 0) {
    out(0) = std::sqrt(std::max(0.0, (l + mj + 0.5) / denom)) * spherical_harmonic(l, m_lo, n);
    out(1) = std::sqrt(std::max(0.0, (l - mj + 0.5) / denom)) * spherical_harmonic(l, m_hi, n);
  } else {
    out(0) = -std::sqrt(std::max(0.0, (l - mj + 0.5) / denom)) * spherical_harmonic(l, m_lo, n);
    out(1) = std::sqrt(std::max(0.0, (l + mj + 0.5) / denom)) * spherical_harmonic(l, m_hi, n);
  }
  return out;
}

}  // namespace brfw
