#include "brfw/extension_dtn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "brfw/errors.hpp"
#include "brfw/quadrature.hpp"

namespace brfw {

BoundaryFunction BoundaryFunction::zero(const RadialGrid& grid) {
  BoundaryFunction u;
  u.grid = grid;
  u.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()));
  return u;
}

double BoundaryFunction::l2_norm2() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = grid.nodes[i];
    s += grid.weights[i] * p * p * std::norm(values(i));
  }
  return s;
}

double BoundaryFunction::h12_norm2() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = grid.nodes[i];
    s += (1.0 + p) * grid.weights[i] * p * p * std::norm(values(i));
  }
  return s;
}

BoundaryFunction& BoundaryFunction::operator+=(const BoundaryFunction& o) {
  if (o.values.size() != values.size()) throw DomainError("boundary functions on different grids");
  values += o.values;
  return *this;
}

BoundaryFunction BoundaryFunction::operator*(std::complex<double> a) const {
  BoundaryFunction r = *this;
  r.values *= a;
  return r;
}

XGrid XGrid::geometric(double x_max, int panels, int points, double first_fraction) {
  if (!(x_max > 0.0) || panels < 1 || points < 1 || !(first_fraction > 0.0) ||
      !(first_fraction < 1.0))
    throw ConfigError("extension.x_grid", "invalid x-grid parameters");
  XGrid g;
  g.x_max = x_max;
  std::vector<double> edges{0.0};
  const double ratio = std::pow(first_fraction, -1.0 / std::max(panels - 1, 1));
  for (int k = panels - 1; k >= 0; --k)
    edges.push_back(panels == 1 ? x_max : x_max * std::pow(ratio, -k));
  const GaussRule& rule = gauss_legendre(points);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    for (int i = 0; i < points; ++i) {
      g.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
      g.weights.push_back(0.5 * (b - a) * rule.weights[i]);
    }
  }
  return g;
}

XGrid XGrid::for_params(const PhysParams& params) {
  return geometric(40.0 / params.rest_energy(), 50, 8);
}

ExtensionField& ExtensionField::operator+=(const ExtensionField& o) {
  if (o.values.rows() != values.rows() || o.values.cols() != values.cols())
    throw DomainError("extension fields differ in shape");
  boundary += o.boundary;
  values += o.values;
  dx += o.dx;
  return *this;
}

ExtensionField ExtensionField::operator*(std::complex<double> a) const {
  ExtensionField r = *this;
  r.boundary = boundary * a;
  r.values *= a;
  r.dx *= a;
  return r;
}

ExtensionField profile_field(const BoundaryFunction& u, const XGrid& x,
                             const std::vector<double>& rate) {
  const Eigen::Index np = u.values.size();
  const Eigen::Index nx = static_cast<Eigen::Index>(x.size());
  if (static_cast<Eigen::Index>(rate.size()) != np) throw DomainError("rate profile size");
  ExtensionField f;
  f.boundary = u;
  f.x = x;
  f.values.resize(nx, np);
  f.dx.resize(nx, np);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double e = std::exp(-rate[j] * x.nodes[i]);
      f.values(i, j) = u.values(j) * e;
      f.dx(i, j) = -rate[j] * u.values(j) * e;
    }
  }
  return f;
}

ExtensionField extend(const BoundaryFunction& u, const XGrid& x, const PhysParams& params) {
  std::vector<double> rate(u.grid.size());
  for (std::size_t j = 0; j < rate.size(); ++j) rate[j] = lambda_of(u.grid.nodes[j], params);
  return profile_field(u, x, rate);
}

Eigen::VectorXcd extension_slice(const BoundaryFunction& u, double x, const PhysParams& params) {
  Eigen::VectorXcd out(u.values.size());
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out(j) = u.values(j) * std::exp(-lambda_of(u.grid.nodes[j], params) * x);
  return out;
}

BoundaryFunction dtn_apply(const BoundaryFunction& u, const PhysParams& params) {
  BoundaryFunction r = u;
  for (Eigen::Index j = 0; j < r.values.size(); ++j)
    r.values(j) *= lambda_of(u.grid.nodes[j], params);
  return r;
}

Eigen::VectorXcd dtn_richardson(const BoundaryFunction& u, const PhysParams& params, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  Eigen::VectorXcd out(u.values.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double lam = lambda_of(u.grid.nodes[j], params);
    auto value = [&](double x) { return u.values(j) * std::exp(-lam * x); };
    auto centered = [&](double step) { return -(value(step) - value(-step)) / (2.0 * step); };
    const double step = h / lam;
    out(j) = (4.0 * centered(0.5 * step) - centered(step)) / 3.0;
  }
  return out;
}

EnergyResult dirichlet_energy(const ExtensionField& field, const PhysParams& params,
                              double tail_tol) {
  const auto& grid = field.boundary.grid;
  const Eigen::Index np = field.values.cols();
  EnergyResult r;
  double lam_min = lambda_of(grid.nodes.front(), params);
  for (Eigen::Index j = 0; j < np; ++j) {
    const double p = grid.nodes[j];
    const double lam = lambda_of(p, params);
    lam_min = std::min(lam_min, lam);
    double col = 0.0;
    for (Eigen::Index i = 0; i < field.values.rows(); ++i)
      col += field.x.weights[i] *
             (std::norm(field.dx(i, j)) + lam * lam * std::norm(field.values(i, j)));
    r.value += grid.weights[j] * p * p * col;
  }
  if (std::exp(-2.0 * lam_min * field.x.x_max) > tail_tol)
    r.warnings.push_back("x_max too small: truncated tail exceeds tolerance");
  return r;
}

EnergyResult dirichlet_energy(const BoundaryFunction& u, const PhysParams& params) {
  EnergyResult r;
  for (Eigen::Index j = 0; j < u.values.size(); ++j) {
    const double p = u.grid.nodes[j];
    r.value += u.grid.weights[j] * p * p * lambda_of(p, params) * std::norm(u.values(j));
  }
  return r;
}

std::pair<double, double> minimality_check(const BoundaryFunction& u,
                                           const ExtensionField& perturbation,
                                           double amplitude, const PhysParams& params) {
  if (perturbation.boundary.values.size() > 0 &&
      perturbation.boundary.values.cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("perturbation must have zero trace");
  ExtensionField v = extend(u, perturbation.x, params);
  const double base = dirichlet_energy(v, params).value;
  v += perturbation * amplitude;
  return {base, dirichlet_energy(v, params).value};
}

double trace_inequality_scale(const ExtensionField& phi, const PhysParams& params) {
  const auto& grid = phi.boundary.grid;
  const double m2c4 = params.rest_energy() * params.rest_energy();
  double s = 0.0;
  for (Eigen::Index j = 0; j < phi.values.cols(); ++j) {
    const double p = grid.nodes[j];
    double col = 0.0;
    for (Eigen::Index i = 0; i < phi.values.rows(); ++i)
      col += phi.x.weights[i] * (std::norm(phi.dx(i, j)) + m2c4 * std::norm(phi.values(i, j)));
    s += grid.weights[j] * p * p * col;
  }
  return s;
}

double trace_inequality_margin(const ExtensionField& phi, const PhysParams& params) {
  return trace_inequality_scale(phi, params) - params.rest_energy() * phi.boundary.l2_norm2();
}

}  // namespace brfw

namespace brfw {

namespace {

BoundaryFunction random_boundary(const RadialGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0), width(0.5, 4.0);
  BoundaryFunction u = BoundaryFunction::zero(grid);
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> a(coef(rng), coef(rng));
    const double w = width(rng);
    for (Eigen::Index j = 0; j < u.values.size(); ++j) {
      const double p = grid.nodes[j] / w;
      u.values(j) += a * std::exp(-p * p);
    }
  }
  return u;
}

double weighted_norm2(const RadialGrid& grid, const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    s += grid.weights[j] * grid.nodes[j] * grid.nodes[j] * std::norm(v(j));
  return s;
}

}  // namespace

DtnCheckReport dtn_consistency_check(const DtnCheckOptions& o, const PhysParams& params) {
  params.validate();
  const RadialGrid grid = build_grid(o.n, o.s);
  const double mc2 = params.rest_energy();
  const XGrid x = XGrid::geometric(40.0 / mc2, o.x_panels, o.x_points);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DtnCheckReport r;
  auto note = [&r](const std::vector<std::string>& w) {
    for (const auto& s : w)
      if (std::find(r.warnings.begin(), r.warnings.end(), s) == r.warnings.end())
        r.warnings.push_back(s);
  };

  std::vector<BoundaryFunction> data;
  for (int k = 0; k < o.samples; ++k) {
    data.push_back(random_boundary(grid, rng));
    const BoundaryFunction& u = data.back();
    const EnergyResult field = dirichlet_energy(extend(u, x, params), params);
    const EnergyResult formula = dirichlet_energy(u, params);
    note(field.warnings);
    r.energy_rel_diff.push_back(std::abs(field.value - formula.value) / formula.value);
    const Eigen::VectorXcd exact = dtn_apply(u, params).values;
    const Eigen::VectorXcd fd = dtn_richardson(u, params, o.richardson_step);
    r.richardson_rel.push_back(std::sqrt(weighted_norm2(grid, fd - exact) /
                                         weighted_norm2(grid, exact)));
  }

  for (int k = 0; k < o.perturbations; ++k) {
    const BoundaryFunction& u = data[static_cast<std::size_t>(k) % data.size()];
    const double mu = mc2 * (0.5 + 4.5 * unit(rng));
    const BoundaryFunction g = random_boundary(grid, rng);
    ExtensionField w;
    w.boundary = BoundaryFunction::zero(grid);
    w.x = x;
    w.values.resize(static_cast<Eigen::Index>(x.size()), g.values.size());
    w.dx.resizeLike(w.values);
    for (Eigen::Index i = 0; i < w.values.rows(); ++i) {
      const double t = x.nodes[i];
      const double e = std::exp(-mu * t);
      for (Eigen::Index j = 0; j < w.values.cols(); ++j) {
        w.values(i, j) = g.values(j) * t * e;
        w.dx(i, j) = g.values(j) * (1.0 - mu * t) * e;
      }
    }
    const double amplitude = (unit(rng) - 0.5) * 2.0 * mc2;
    const auto [base, perturbed] = minimality_check(u, w, amplitude, params);
    const double pert_energy = dirichlet_energy(w * amplitude, params).value;
    r.minimality_gap.push_back((perturbed - base) / base);
    r.cross_term_rel.push_back(std::abs(perturbed - base - pert_energy) / base);
  }

  for (int k = 0; k < o.perturbations; ++k) {
    const BoundaryFunction u = random_boundary(grid, rng);
    std::vector<double> rate(grid.size());
    for (double& v : rate) v = mc2 * std::exp(std::log(0.5) + std::log(40.0) * unit(rng));
    const ExtensionField phi = profile_field(u, x, rate);
    r.trace_margin_rel.push_back(trace_inequality_margin(phi, params) /
                                 trace_inequality_scale(phi, params));
  }
  const ExtensionField eq =
      profile_field(data.front(), x, std::vector<double>(grid.size(), mc2));
  r.equality_margin_rel =
      std::abs(trace_inequality_margin(eq, params)) / trace_inequality_scale(eq, params);
  return r;
}

}  // namespace brfw
