#include "brfw/discretization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "brfw/errors.hpp"
#include "brfw/parallel.hpp"
#include "brfw/quadrature.hpp"

namespace brfw {

namespace {

constexpr double kPi = std::numbers::pi;

// Kernel with factors precomputed by the caller: returns p^2 q^2 k(p,q).
double weighted_kernel(const RadialKernel& k, double p, double q, double zm1,
                       const double* fp, const double* fq) {
  if (!(zm1 > 0.0)) return 0.0;  // underflow at exact coincidence; log-integrable
  double sum = 0.0;
  for (std::size_t t = 0; t < k.terms.size(); ++t) {
    const double f = fp[t] * fq[t];
    if (f != 0.0) sum += f * legendre_q_offset(k.terms[t].l, zm1);
  }
  return k.coupling * sum * p * q / kPi;
}

struct Factors {
  std::vector<double> v;
  void fill(const RadialKernel& k, double p) {
    v.resize(k.terms.size());
    for (std::size_t t = 0; t < k.terms.size(); ++t) v[t] = k.terms[t].factor(p);
  }
};

}  // namespace

Scheme scheme_from_string(const std::string& name) {
  if (name == "nystrom") return Scheme::nystrom;
  if (name == "galerkin") return Scheme::galerkin;
  throw ConfigError("grid.scheme", "unknown scheme '" + name + "'");
}

std::string to_string(Scheme s) { return s == Scheme::nystrom ? "nystrom" : "galerkin"; }

GridMapping mapping_from_string(const std::string& name) {
  if (name == "rational") return GridMapping::rational;
  if (name == "exponential") return GridMapping::exponential;
  if (name == "linear") return GridMapping::linear;
  throw ConfigError("grid.mapping", "unknown mapping '" + name + "'");
}

std::string to_string(GridMapping m) {
  switch (m) {
    case GridMapping::rational:
      return "rational";
    case GridMapping::exponential:
      return "exponential";
    default:
      return "linear";
  }
}

RadialGrid GridSpec::build(double Z) const {
  switch (mapping) {
    case GridMapping::exponential:
      return build_grid_exponential(n, scale_for(Z), lower, upper, grading);
    case GridMapping::linear:
      return build_grid_linear(n, extent > 0.0 ? extent : 40.0 * scale_for(Z));
    default:
      return build_grid(n, scale_for(Z));
  }
}

GridSpec GridSpec::strong_coupling(int n) {
  GridSpec g;
  g.n = n;
  g.mapping = GridMapping::exponential;
  g.scheme = Scheme::galerkin;
  g.degree = 5;
  return g;
}

Eigen::VectorXd DiscreteOperator::l2_weights() const {
  auto w = grid.l2_weights();
  return Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

Eigen::VectorXd DiscreteOperator::nodal_values(const Eigen::VectorXd& coeffs) const {
  if (scheme == Scheme::galerkin) return coeffs.cwiseProduct(basis_scale);
  return coeffs.cwiseQuotient(l2_weights().cwiseSqrt());
}

Eigen::VectorXd DiscreteOperator::coefficients(const Eigen::VectorXd& nodal) const {
  if (scheme == Scheme::galerkin) return nodal.cwiseQuotient(basis_scale);
  return nodal.cwiseProduct(l2_weights().cwiseSqrt());
}

double subtraction_integral(const RadialKernel& kernel, double p, double tol) {
  Factors fp;
  fp.fill(kernel, p);
  Factors fq;
  auto integrand_at = [&](double q, double gap) {
    fq.fill(kernel, q);
    const double zm1 = gap * gap / (2.0 * p * q);
    const double profile = 2.0 * p * p / (p * p + q * q);
    return weighted_kernel(kernel, p, q, zm1, fp.v.data(), fq.v.data()) * profile / (p * p);
  };
  // q = p - u and q = p + u with u in (0, p], then the tail beyond 2p
  auto below = [&](double u) { return u >= p ? 0.0 : integrand_at(p - u, u); };
  auto above = [&](double u) { return integrand_at(p + u, u); };
  auto tail = [&](double q) { return integrand_at(q, q - p); };
  const double scale = std::abs(kernel.coupling) * p + 1e-300;
  double total = integrate_adaptive(below, 0.0, p, tol * scale, tol);
  total += integrate_adaptive(above, 0.0, p, tol * scale, tol);
  total += integrate_adaptive(tail, 2.0 * p, std::numeric_limits<double>::infinity(),
                              tol * scale, tol);
  return total;
}

namespace {

Eigen::MatrixXd nystrom_kernel_form(const RadialGrid& grid, const RadialKernel& kernel) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  const auto& p = grid.nodes;
  const auto& w = grid.weights;
  std::vector<Factors> fac(n);
  for (Eigen::Index i = 0; i < n; ++i) fac[i].fill(kernel, p[i]);

  // K(i,j) = p_i^2 p_j^2 k(p_i,p_j)
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const Eigen::Index i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = p[i] - p[j];
      K(i, j) = weighted_kernel(kernel, p[i], p[j], d * d / (2.0 * p[i] * p[j]),
                                fac[i].v.data(), fac[j].v.data());
    }
  });
  K.triangularView<Eigen::StrictlyLower>() = K.transpose();

  std::vector<double> diag(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const Eigen::Index i = static_cast<Eigen::Index>(ii);
    const double pi2 = p[i] * p[i];
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double profile = 2.0 * pi2 / (pi2 + p[j] * p[j]);
      s += w[j] * K(i, j) / pi2 * profile;
    }
    diag[i] = subtraction_integral(kernel, p[i]) - s;
  });

  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      M(i, j) = (i == j) ? diag[i] : std::sqrt(w[i] * w[j]) * K(i, j) / (p[i] * p[j]);
    }
  }
  return M;
}

// Continuous piecewise-polynomial Galerkin of degree d in a coordinate u(p):
// u = p for rational/linear grids, u = log p for exponential grids. Points are a
// pinned left end, the grid nodes, then continuation points; every d-th point
// is an element boundary. Values at both end points are pinned to zero.
struct Mesh {
  std::vector<double> u;
  int degree = 1;
  bool log_coord = false;
  Mesh(const RadialGrid& grid, int d) : degree(d) {
    if (d < 1 || d > 6) throw ConfigError("grid.degree", "Galerkin degree must be in [1, 6]");
    const int n = static_cast<int>(grid.size());
    log_coord = grid.mapping == GridMapping::exponential;
    u.reserve(n + d + 1);
    if (log_coord) {
      const double first = std::log(grid.nodes[0]), second = std::log(grid.nodes[1]);
      u.push_back(first - (second - first));
      for (double v : grid.nodes) u.push_back(std::log(v));
      const double step = u[n] - u[n - 1];
      do {
        u.push_back(u.back() + step);
      } while ((static_cast<int>(u.size()) - 1) % d != 0);
    } else {
      u.push_back(0.0);
      for (double v : grid.nodes) u.push_back(v);
      const double ratio = grid.nodes[n - 1] / grid.nodes[n - 2];
      do {
        u.push_back(u.back() * ratio);
      } while ((static_cast<int>(u.size()) - 1) % d != 0);
    }
  }
  double p_of(double c) const { return log_coord ? std::exp(c) : c; }
  double jacobian(double c) const { return log_coord ? std::exp(c) : 1.0; }
  // q - p for coordinates c and c + delta, accurate for small delta
  double gap(double c, double delta) const {
    return log_coord ? std::exp(c) * std::expm1(delta) : delta;
  }
  int elements() const { return (static_cast<int>(u.size()) - 1) / degree; }
  int basis_size() const { return static_cast<int>(u.size()) - 2; }
  // basis index of local node k on element e, -1 if pinned
  int index(int e, int k) const {
    const int g = e * degree + k;
    return (g == 0 || g == static_cast<int>(u.size()) - 1) ? -1 : g - 1;
  }
  double lo(int e) const { return u[e * degree]; }
  double hi(int e) const { return u[(e + 1) * degree]; }
  void shapes(int e, double c, double* out) const {
    const double* y = &u[e * degree];
    for (int k = 0; k <= degree; ++k) {
      double v = 1.0;
      for (int m = 0; m <= degree; ++m)
        if (m != k) v *= (c - y[m]) / (y[k] - y[m]);
      out[k] = v;
    }
  }
};

constexpr int kMaxLocal = 7;
using Local = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxLocal, kMaxLocal>;

// Gauss points of one element in p, with weights including dp/du.
struct ElementRule {
  std::vector<double> x, w;
  std::vector<std::array<double, kMaxLocal>> shape;
  std::vector<Factors> fac;
};

ElementRule element_rule(const Mesh& mesh, int e, int points, const RadialKernel* kernel) {
  const GaussRule& g = gauss_legendre(points);
  ElementRule r;
  const double a = mesh.lo(e), b = mesh.hi(e), h = b - a;
  for (int i = 0; i < points; ++i) {
    const double c = a + 0.5 * h * (g.nodes[i] + 1.0);
    const double x = mesh.p_of(c);
    r.x.push_back(x);
    r.w.push_back(0.5 * h * g.weights[i] * mesh.jacobian(c));
    std::array<double, kMaxLocal> sh{};
    mesh.shapes(e, c, sh.data());
    r.shape.push_back(sh);
    if (kernel != nullptr) {
      Factors f;
      f.fill(*kernel, x);
      r.fac.push_back(std::move(f));
    }
  }
  return r;
}

Local far_pair(const RadialKernel& k, int d, const ElementRule& A, const ElementRule& B) {
  Local loc = Local::Zero(d + 1, d + 1);
  double row[kMaxLocal];
  for (std::size_t g = 0; g < A.x.size(); ++g) {
    std::fill(row, row + d + 1, 0.0);
    const double p = A.x[g];
    for (std::size_t h = 0; h < B.x.size(); ++h) {
      const double q = B.x[h];
      const double diff = p - q;
      const double v = B.w[h] * weighted_kernel(k, p, q, diff * diff / (2.0 * p * q),
                                                A.fac[g].v.data(), B.fac[h].v.data());
      for (int b = 0; b <= d; ++b) row[b] += v * B.shape[h][b];
    }
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) loc(a, b) += A.w[g] * A.shape[g][a] * row[b];
  }
  return loc;
}

constexpr int kSingularPoints = 20;

Local same_element(const RadialKernel& k, const Mesh& mesh, int e) {
  const int d = mesh.degree;
  const GaussRule& g = gauss_legendre(kSingularPoints);
  const double a = mesh.lo(e), b = mesh.hi(e), h = b - a;
  Local loc = Local::Zero(d + 1, d + 1);
  Factors fp, fq;
  double sp[kMaxLocal], sq[kMaxLocal], row[kMaxLocal];
  for (int i = 0; i < kSingularPoints; ++i) {
    const double v = 0.5 * (g.nodes[i] + 1.0);
    const double cp = a + h * v * v * (3.0 - 2.0 * v);
    const double wp = 0.5 * g.weights[i] * h * 6.0 * v * (1.0 - v) * mesh.jacobian(cp);
    const double p = mesh.p_of(cp);
    fp.fill(k, p);
    mesh.shapes(e, cp, sp);
    std::fill(row, row + d + 1, 0.0);
    for (int side = 0; side < 2; ++side) {
      const double span = side == 0 ? cp - a : b - cp;
      for (int j = 0; j < kSingularPoints; ++j) {
        const double s = 0.5 * (g.nodes[j] + 1.0);
        const double delta = (side == 0 ? -span : span) * s * s * s;
        const double cq = cp + delta;
        const double wq = 0.5 * g.weights[j] * 3.0 * span * s * s * mesh.jacobian(cq);
        const double gap = mesh.gap(cp, delta);
        const double q = p + gap;
        fq.fill(k, q);
        mesh.shapes(e, cq, sq);
        const double val =
            wq * weighted_kernel(k, p, q, gap * gap / (2.0 * p * q), fp.v.data(), fq.v.data());
        for (int c = 0; c <= d; ++c) row[c] += val * sq[c];
      }
    }
    for (int r = 0; r <= d; ++r)
      for (int c = 0; c <= d; ++c) loc(r, c) += wp * sp[r] * row[c];
  }
  return loc;
}

// Element e against e+1; singular only at the shared boundary point.
Local adjacent_elements(const RadialKernel& k, const Mesh& mesh, int e) {
  const int d = mesh.degree;
  const GaussRule& g = gauss_legendre(kSingularPoints);
  const double a = mesh.lo(e), t = mesh.hi(e), b = mesh.hi(e + 1);
  const double h1 = t - a, h2 = b - t;
  Local loc = Local::Zero(d + 1, d + 1);
  Factors fp, fq;
  double sp[kMaxLocal], sq[kMaxLocal], row[kMaxLocal];
  for (int i = 0; i < kSingularPoints; ++i) {
    const double v = 0.5 * (g.nodes[i] + 1.0);
    const double dp = h1 * v * v * v;
    const double cp = t - dp;
    const double wp = 0.5 * g.weights[i] * 3.0 * h1 * v * v * mesh.jacobian(cp);
    const double p = mesh.p_of(cp);
    fp.fill(k, p);
    mesh.shapes(e, cp, sp);
    std::fill(row, row + d + 1, 0.0);
    for (int j = 0; j < kSingularPoints; ++j) {
      const double s = 0.5 * (g.nodes[j] + 1.0);
      const double dq = h2 * s * s * s;
      const double cq = t + dq;
      const double wq = 0.5 * g.weights[j] * 3.0 * h2 * s * s * mesh.jacobian(cq);
      const double gap = mesh.gap(cp, dp + dq);
      const double q = p + gap;
      fq.fill(k, q);
      mesh.shapes(e + 1, cq, sq);
      const double val =
          wq * weighted_kernel(k, p, q, gap * gap / (2.0 * p * q), fp.v.data(), fq.v.data());
      for (int c = 0; c <= d; ++c) row[c] += val * sq[c];
    }
    for (int r = 0; r <= d; ++r)
      for (int c = 0; c <= d; ++c) loc(r, c) += wp * sp[r] * row[c];
  }
  return loc;
}

void scatter(Eigen::MatrixXd& M, const Mesh& mesh, int e, int f, const Local& loc) {
  for (int a = 0; a <= mesh.degree; ++a) {
    const int i = mesh.index(e, a);
    if (i < 0) continue;
    for (int b = 0; b <= mesh.degree; ++b) {
      const int j = mesh.index(f, b);
      if (j < 0) continue;
      M(i, j) += loc(a, b);
    }
  }
}

Eigen::MatrixXd galerkin_kernel_form(const RadialGrid& grid, const RadialKernel& kernel,
                                     int degree) {
  const Mesh mesh(grid, degree);
  const int ne = mesh.elements();
  const int d = mesh.degree;
  std::vector<ElementRule> coarse(ne), fine(ne);
  for (int e = 0; e < ne; ++e) {
    coarse[e] = element_rule(mesh, e, 2 * d + 8, &kernel);
    fine[e] = element_rule(mesh, e, 2 * d + 14, &kernel);
  }
  // contributions of pairs (e, f) with f >= e, kept per e for a fixed merge order
  std::vector<std::vector<std::pair<int, Local>>> rows(ne);
  parallel_for(static_cast<std::size_t>(ne), [&](std::size_t ee) {
    const int e = static_cast<int>(ee);
    auto& out = rows[e];
    out.emplace_back(e, same_element(kernel, mesh, e));
    if (e + 1 < ne) out.emplace_back(e + 1, adjacent_elements(kernel, mesh, e));
    for (int f = e + 2; f < ne; ++f) {
      const bool near = f <= e + 3;
      out.emplace_back(f, far_pair(kernel, d, near ? fine[e] : coarse[e],
                                   near ? fine[f] : coarse[f]));
    }
  });
  const int n = mesh.basis_size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < ne; ++e) {
    for (const auto& [f, loc] : rows[e]) {
      scatter(M, mesh, e, f, loc);
      if (f != e) scatter(M, mesh, f, e, loc.transpose());
    }
  }
  return 0.5 * (M + M.transpose());
}

}  // namespace

std::vector<double> galerkin_nodes(const RadialGrid& grid, int degree) {
  const Mesh mesh(grid, degree);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < mesh.u.size(); ++i) out.push_back(mesh.p_of(mesh.u[i]));
  return out;
}

Eigen::MatrixXd assemble_kernel_form(const RadialGrid& grid, const RadialKernel& kernel,
                                     Scheme scheme, int degree) {
  if (grid.size() < 2) throw DomainError("grid too small");
  return scheme == Scheme::nystrom ? nystrom_kernel_form(grid, kernel)
                                   : galerkin_kernel_form(grid, kernel, degree);
}

Eigen::MatrixXd assemble_weight_form(const RadialGrid& grid,
                                     const std::function<double(double)>& weight,
                                     Scheme scheme, int degree) {
  if (scheme == Scheme::nystrom) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) M(i, i) = weight(grid.nodes[i]);
    return M;
  }
  const Mesh mesh(grid, degree);
  const int d = mesh.degree;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(mesh.basis_size(), mesh.basis_size());
  for (int e = 0; e < mesh.elements(); ++e) {
    const ElementRule r = element_rule(mesh, e, 2 * d + 10, nullptr);
    Local loc = Local::Zero(d + 1, d + 1);
    for (std::size_t g = 0; g < r.x.size(); ++g) {
      const double v = r.w[g] * weight(r.x[g]) * r.x[g] * r.x[g];
      for (int a = 0; a <= d; ++a)
        for (int b = 0; b <= d; ++b) loc(a, b) += v * r.shape[g][a] * r.shape[g][b];
    }
    scatter(M, mesh, e, e, loc);
  }
  return 0.5 * (M + M.transpose());
}

DiscreteOperator assemble_operator(const RadialGrid& grid, const RadialKernel& kernel,
                                   const PhysParams& params, Scheme scheme, int degree) {
  params.validate();
  DiscreteOperator op;
  op.scheme = scheme;
  op.degree = scheme == Scheme::galerkin ? degree : 0;
  op.grid = grid;
  op.channel = kernel.channel;
  op.params = params;
  op.basis_nodes = scheme == Scheme::galerkin ? galerkin_nodes(grid, degree) : grid.nodes;
  if (!params.inside_tix_window())
    op.warnings.push_back("Z/c outside the Tix window; operator may be unbounded below");
  const Eigen::Index n = static_cast<Eigen::Index>(op.basis_nodes.size());
  op.kinetic_excess = assemble_weight_form(
      grid, [&](double p) { return kinetic_excess(p, params); }, scheme, degree);
  op.gram = scheme == Scheme::nystrom
                ? Eigen::MatrixXd::Identity(n, n)
                : assemble_weight_form(grid, [](double) { return 1.0; }, scheme, degree);
  if (kernel.coupling == 0.0 || kernel.terms.empty())
    op.potential = Eigen::MatrixXd::Zero(n, n);
  else
    op.potential = assemble_kernel_form(grid, kernel, scheme, degree);
  op.basis_scale = Eigen::VectorXd::Ones(n);
  if (scheme == Scheme::galerkin) {
    // unit gram diagonal; the raw basis spans many decades of p^3
    op.basis_scale = op.gram.diagonal().cwiseSqrt().cwiseInverse();
    const auto S = op.basis_scale.asDiagonal();
    op.gram = S * op.gram * S;
    op.kinetic_excess = S * op.kinetic_excess * S;
    op.potential = S * op.potential * S;
  }
  return op;
}

DiscreteOperator assemble_operator(const RadialGrid& grid, const ChannelSpec& channel,
                                   const PhysParams& params, Scheme scheme, int degree) {
  return assemble_operator(grid, br_kernel(channel, params), params, scheme, degree);
}

DiscreteOperator assemble_operator(const GridSpec& spec, const ChannelSpec& channel,
                                   const PhysParams& params) {
  return assemble_operator(spec.build(params.Z), channel, params, spec.scheme, spec.degree);
}

MetricH12 assemble_h12_metric(const RadialGrid& grid) {
  MetricH12 m;
  m.diagonal.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    m.diagonal(static_cast<Eigen::Index>(i)) =
        (1.0 + grid.nodes[i]) * grid.weights[i] * grid.nodes[i] * grid.nodes[i];
  return m;
}

double operator_norm_h12(const Eigen::MatrixXd& A, const MetricH12& metric) {
  if (A.rows() != metric.diagonal.size() || A.cols() != metric.diagonal.size())
    throw DomainError("operator and metric dimensions differ");
  const Eigen::VectorXd s = metric.diagonal.cwiseSqrt();
  const Eigen::MatrixXd B = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  return svd.singularValues()(0);
}

}  // namespace brfw
