#include "brfw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "brfw/eigensolve.hpp"
#include "brfw/errors.hpp"
#include "brfw/quadrature.hpp"

namespace brfw {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string label_of(const char* key, double v) {
  std::ostringstream os;
  os << key << "=" << v;
  return os.str();
}

void finish(InequalityReport& r) {
  r.sample_count = r.ratios.size();
  r.max_ratio = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
  r.margin = r.theoretical_constant - r.max_ratio;
}
}  // namespace

double hardy_ratio(double alpha) {
  if (!(alpha > -0.5)) throw DomainError("Hardy family needs alpha > -1/2");
  // radial l = 0: ||psi/r||^2 = int psi^2 dr, ||grad psi||^2 = int psi'^2 r^2 dr
  auto weight = [alpha](double r) { return std::exp(2.0 * alpha * std::log(r) - 2.0 * r); };
  auto num = [&](double r) { return weight(r); };
  auto den = [&](double r) { return (alpha - r) * (alpha - r) * weight(r); };
  const double n = integrate_adaptive(num, 0.0, 1.0) + integrate_adaptive(num, 1.0, kInf);
  const double d = integrate_adaptive(den, 0.0, 1.0) + integrate_adaptive(den, 1.0, kInf);
  return std::sqrt(n / d);
}

InequalityReport hardy_check(const std::vector<double>& alphas) {
  InequalityReport r;
  r.name = "hardy";
  r.family = "psi = r^alpha exp(-r), l = 0";
  r.theoretical_constant = constants::kHardy;
  for (double a : alphas) {
    r.labels.push_back(label_of("alpha", a));
    r.ratios.push_back(hardy_ratio(a));
  }
  finish(r);
  return r;
}

GridSpec inequality_grid(int n, double s) {
  GridSpec g;
  g.n = n;
  g.s = s;
  g.scheme = Scheme::galerkin;
  g.degree = 1;
  return g;
}

InequalityReport kato_check(const GridSpec& grid) {
  const RadialGrid g = grid.build(1.0);
  const RadialKernel kernel = nonrel_kernel(0, 1.0);
  const Eigen::MatrixXd A = -assemble_kernel_form(g, kernel, grid.scheme, grid.degree);
  const Eigen::MatrixXd B =
      assemble_weight_form(g, [](double p) { return p; }, grid.scheme, grid.degree);
  InequalityReport r;
  r.name = "kato";
  r.family = "span of the " + to_string(grid.scheme) + " basis on " + g.describe() + ", l=0";
  r.theoretical_constant = constants::kKato;
  r.labels.push_back("l=0");
  r.ratios.push_back(largest_pencil_eigenvalue(A, B));
  finish(r);
  return r;
}

InequalityReport tix_check(const std::vector<int>& kappas, const PhysParams& params, int n) {
  PhysParams unit = params;
  unit.Z = 1.0;
  unit.validate();
  const GridSpec grid = inequality_grid(n, unit.m * unit.c);
  const RadialGrid g = grid.build(1.0);
  const Eigen::MatrixXd B = assemble_weight_form(
      g, [&](double p) { return lambda_of(p, unit) / unit.c; }, grid.scheme, grid.degree);
  InequalityReport r;
  r.name = "tix";
  r.family = "span of the " + to_string(grid.scheme) + " basis on " + g.describe();
  r.theoretical_constant = constants::kTix;
  for (int kappa : kappas) {
    const RadialKernel kernel = br_kernel(ChannelSpec::from_kappa(kappa), unit);
    const Eigen::MatrixXd A = -assemble_kernel_form(g, kernel, grid.scheme, grid.degree);
    r.labels.push_back("kappa=" + std::to_string(kappa));
    r.ratios.push_back(largest_pencil_eigenvalue(A, B));
  }
  finish(r);
  return r;
}

std::vector<CriticalRow> critical_coupling_scan(const CriticalScanOptions& options,
                                                const PhysParams& base) {
  if (options.n_values.empty()) throw ConfigError("critical.n_values", "empty refinement list");
  const ChannelSpec channel = ChannelSpec::from_kappa(options.kappa);
  std::vector<CriticalRow> rows;
  for (double Z : options.Z_values) {
    CriticalRow row;
    row.Z = Z;
    PhysParams p = base;
    p.Z = Z;
    for (int n : options.n_values) {
      GridSpec g = GridSpec::strong_coupling(n);
      g.upper += options.cutoff_growth * std::log(static_cast<double>(n) / options.n_values[0]);
      const DiscreteOperator op = assemble_operator(g, channel, p);
      const SpectralResult sr = dense_spectrum(op, 1);
      row.n_values.push_back(n);
      row.lambda1.push_back(sr.eigenvalues[0] / op.shift());
    }
    const auto [lo, hi] = std::minmax_element(row.lambda1.begin(), row.lambda1.end());
    row.variation = *hi - *lo;
    row.drop = row.lambda1.front() - row.lambda1.back();
    row.stable = *lo > 0.0 && row.variation < options.stability_tol;
    bool monotone = true;
    for (std::size_t i = 1; i < row.lambda1.size(); ++i)
      monotone = monotone && row.lambda1[i] < row.lambda1[i - 1];
    row.collapsing = monotone && row.drop > options.collapse_drop;
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd commutator_matrix(const RadialGrid& grid, const ChannelSpec& channel,
                                  const ChiProfile& profile, double R, const PhysParams& params) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  const auto& p = grid.nodes;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const int ls[2] = {channel.l_up, channel.l_down};
  for (int b = 0; b < 2; ++b) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        M(b * n + i, b * n + j) = multiplier_channel_kernel(profile, ls[b], R, p[i], p[j]) *
                                  grid.weights[j] * p[j] * p[j];
  }
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix2d rot = channel_rotation(p[i], channel.kappa, params);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) U(a * n + i, b * n + i) = rot(a, b);
  }
  return M - U.transpose() * M * U;
}

CommutatorDecayReport commutator_decay(const CommutatorOptions& options,
                                       const PhysParams& params) {
  if (options.R_values.size() < 2) throw ConfigError("commutator.R_values", "need two R values");
  for (std::size_t i = 1; i < options.R_values.size(); ++i)
    if (!(options.R_values[i] > options.R_values[i - 1]))
      throw ConfigError("commutator.R_values", "R values must increase");
  params.validate();
  const RadialGrid grid = build_grid(options.n, options.s);
  const ChannelSpec channel = ChannelSpec::from_kappa(options.kappa);
  const MetricH12 single = assemble_h12_metric(grid);
  MetricH12 metric;
  metric.diagonal.resize(2 * single.diagonal.size());
  metric.diagonal << single.diagonal, single.diagonal;
  CommutatorDecayReport r;
  r.R_values = options.R_values;
  for (double R : options.R_values)
    r.norms.push_back(
        operator_norm_h12(commutator_matrix(grid, channel, options.profile, R, params), metric));
  const std::size_t m = r.R_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(r.R_values[i]), y = std::log(r.norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  r.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - r.fitted_slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = std::log(r.norms[i]) - (icpt + r.fitted_slope * std::log(r.R_values[i]));
    ss += e * e;
  }
  r.fit_residual = std::sqrt(ss / m);
  r.flagged = r.fit_residual > 0.1;
  return r;
}

double gaussian_inverse_radius_moment() {
  // phi(r) = pi^{-3/4} exp(-r^2/2): (phi, phi / r) = 4 pi int phi^2 r dr
  auto f = [](double r) { return 4.0 * kPi * std::pow(kPi, -1.5) * std::exp(-r * r) * r; };
  return integrate_adaptive(f, 0.0, kInf);
}

namespace {

struct PowerFit {
  double A = 0.0, B = 0.0, e = 0.0, residual = 0.0;
};

// g(eta) = -A + B eta^(e - 1) by linear least squares in (A, B) for fixed e
PowerFit fit_for_exponent(const std::vector<double>& eta, const std::vector<double>& g, double e) {
  const std::size_t m = eta.size();
  double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::pow(eta[i], e - 1.0);
    s1 += 1.0;
    sx += x;
    sxx += x * x;
    sy += g[i];
    sxy += x * g[i];
  }
  const double det = s1 * sxx - sx * sx;
  PowerFit f;
  f.e = e;
  const double c0 = (sxx * sy - sx * sxy) / det;
  f.B = (s1 * sxy - sx * sy) / det;
  f.A = -c0;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = g[i] - (c0 + f.B * std::pow(eta[i], e - 1.0));
    ss += d * d;
  }
  f.residual = std::sqrt(ss / m);
  return f;
}

PowerFit fit_power(const std::vector<double>& eta, const std::vector<double>& g) {
  double lo = 1.05, hi = 8.0;
  PowerFit best = fit_for_exponent(eta, g, lo);
  for (int k = 0; k <= 200; ++k) {
    const PowerFit f = fit_for_exponent(eta, g, lo + (hi - lo) * k / 200.0);
    if (f.residual < best.residual) best = f;
  }
  // golden-section refinement around the scan minimum
  double a = std::max(lo, best.e - (hi - lo) / 200.0), b = std::min(hi, best.e + (hi - lo) / 200.0);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - gr * (b - a), d = a + gr * (b - a);
    if (fit_for_exponent(eta, g, c).residual < fit_for_exponent(eta, g, d).residual)
      b = d;
    else
      a = c;
  }
  const PowerFit refined = fit_for_exponent(eta, g, 0.5 * (a + b));
  return refined.residual < best.residual ? refined : best;
}

}  // namespace

ScalingLimitReport scaling_limit(const ScalingOptions& options, PhysParams params) {
  if (options.eta_values.size() < 3) throw ConfigError("scaling.eta_values", "need three eta values");
  for (std::size_t i = 0; i < options.eta_values.size(); ++i) {
    const double e = options.eta_values[i];
    if (!(e > 0.0 && e <= 0.5)) throw ConfigError("scaling.eta_values", "eta must lie in (0, 0.5]");
    if (i > 0 && !(e < options.eta_values[i - 1]))
      throw ConfigError("scaling.eta_values", "eta values must decrease");
  }
  params.Z = options.Z;
  params.validate();
  const RadialGrid grid = build_grid(options.n, 1.0);
  const ChannelSpec channel = ChannelSpec::from_kappa(options.kappa);
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  // radial part of the unit Gaussian in momentum space: int f^2 p^2 dp = 1
  Eigen::VectorXd coeff(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = grid.nodes[i];
    coeff(i) = std::sqrt(grid.weights[i]) * p * 2.0 * std::pow(kPi, -0.25) * std::exp(-0.5 * p * p);
  }
  ScalingLimitReport r;
  r.eta_values = options.eta_values;
  for (double eta : options.eta_values) {
    // a_pm(eta p) with mass m equals a_pm(p) with mass m / eta
    PhysParams scaled = params;
    scaled.m = params.m / eta;
    const Eigen::MatrixXd M =
        assemble_kernel_form(grid, br_kernel(channel, scaled), Scheme::nystrom);
    r.form_values.push_back(eta * coeff.dot(M * coeff));
  }
  std::vector<double> g;
  for (std::size_t i = 0; i < r.eta_values.size(); ++i)
    g.push_back(r.form_values[i] / r.eta_values[i]);
  const PowerFit fit = fit_power(r.eta_values, g);
  r.leading_coefficient = fit.A;
  r.remainder_coefficient = fit.B;
  r.remainder_exponent = fit.e;
  r.reference_coefficient = options.Z * gaussian_inverse_radius_moment();
  const bool negative = std::all_of(r.form_values.begin(), r.form_values.end(),
                                    [](double v) { return v < 0.0; });
  r.flagged = !negative || !(fit.A > 0.0);
  return r;
}

AlgebraScan fw_algebra_scan(std::size_t samples, std::uint64_t seed, const PhysParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  auto random_vector = [&](double lo, double hi) {
    Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
    const double mag = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(rng));
    return MomentumVector(mag * d.normalized());
  };
  const Matrix4c I = Matrix4c::Identity();
  AlgebraScan s;
  s.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const MomentumVector p = random_vector(1e-6, 1e3);
    const MomentumVector q = random_vector(1e-6, 1e3);
    const Matrix4c U = fw_unitary(p, params).entries;
    const Matrix4c Ui = fw_unitary(p, params, true).entries;
    const double lam = lambda_of(p.norm(), params);
    s.unitarity = std::max(s.unitarity, max_abs(U * U.adjoint() - I));
    s.diagonalization =
        std::max(s.diagonalization,
                 max_abs(U * dirac_symbol(p, params).entries * Ui - lam * dirac_beta()) / lam);
    const Matrix4c Pp = projector_symbol(p, 1, params).entries;
    const Matrix4c Pm = projector_symbol(p, -1, params).entries;
    double proj = max_abs(Pp + Pm - I);
    proj = std::max(proj, max_abs(Pp * Pm));
    proj = std::max(proj, max_abs(Pp * Pp - Pp));
    proj = std::max(proj, max_abs(Pm * Pm - Pm));
    proj = std::max(proj, max_abs(Pp - Pp.adjoint()));
    proj = std::max(proj, std::abs(Pp.trace() - 2.0));
    proj = std::max(proj, std::abs(Pm.trace() - 2.0));
    s.projector = std::max(s.projector, proj);
    const cplx scalar(normal(rng), normal(rng));
    const Matrix4c full = U * scalar * fw_unitary(q, params, true).entries;
    const Matrix2c block = fw_block_upper(p, q, scalar, params);
    s.block_form = std::max(
        s.block_form, (full.topLeftCorner<2, 2>() - block).cwiseAbs().maxCoeff() /
                          std::max(1.0, std::abs(scalar)));
  }
  return s;
}

BoundScan pointwise_bound_scan(std::size_t samples, std::uint64_t seed, const PhysParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(rng));
  };
  auto direction = [&] {
    return Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
  };
  const double mc = params.m * params.c;
  BoundScan s;
  s.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const double scale = log_uniform(1e-2, 1e2) * mc;
    const MomentumVector p = log_uniform(1e-3, 1e3) * scale * direction();
    const MomentumVector q = log_uniform(1e-3, 1e3) * scale * direction();
    const double R = log_uniform(1.0, 1e3);
    if ((p - q).norm() == 0.0) continue;
    const double K = spectral_norm(fw_difference_kernel(p, q, R, params).entries);
    s.kernel_ratio = std::max(s.kernel_ratio, K * mc * R / (5.0 * std::sqrt(2.0) * q.norm()));

    const double eta = log_uniform(1e-4, 1.0);
    const double pm = p.norm();
    const auto [ap, am] = a_plus_minus(eta * pm, params);
    const double ap_gap = am * am / (1.0 + ap);  // 1 - a_+ without cancellation
    s.a_plus_ratio =
        std::max(s.a_plus_ratio, ap_gap * 2.0 * mc * mc / (eta * eta * pm * pm));
    s.a_minus_ratio = std::max(s.a_minus_ratio, am * std::sqrt(2.0) * mc / (eta * pm));
  }
  return s;
}

}  // namespace brfw
