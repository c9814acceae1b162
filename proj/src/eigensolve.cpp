#include "brfw/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "brfw/errors.hpp"

namespace brfw {

std::string to_string(SolverRoute r) { return r == SolverRoute::dense ? "dense" : "variational"; }

std::size_t SpectralResult::bound_count() const {
  return static_cast<std::size_t>(std::count(bound.begin(), bound.end(), true));
}

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

void normalize_columns(Eigen::MatrixXd& X, const Eigen::MatrixXd& B) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double nrm = std::sqrt(X.col(j).dot(B * X.col(j)));
    X.col(j) /= nrm;
    // fix the sign by the largest-magnitude entry
    Eigen::Index at = 0;
    X.col(j).cwiseAbs().maxCoeff(&at);
    if (X(at, j) < 0.0) X.col(j) = -X.col(j);
  }
}

}  // namespace

PencilEigen lowest_pencil_eigen(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n)
    throw DomainError("pencil dimensions differ");
  if (k < 1 || k > n) throw DomainError("eigenpair count out of range");
  PencilEigen out;
  if ((A.diagonal().array() > 0.0).all()) {
    const Eigen::VectorXd D = A.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd As = symmetrized(D.asDiagonal() * A * D.asDiagonal());
    Eigen::LLT<Eigen::MatrixXd> llt(As);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd Bs = D.asDiagonal() * B * D.asDiagonal();
      Eigen::MatrixXd C = llt.matrixL().solve(Bs);
      C = llt.matrixL().solve(C.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(C));
      if (es.info() != Eigen::Success) throw NumericalError("inverse pencil eigensolve failed", 0);
      out.inverted = true;
      out.values.resize(k);
      out.vectors.resize(n, k);
      for (int j = 0; j < k; ++j) {
        const Eigen::Index src = n - 1 - j;
        out.values(j) = 1.0 / es.eigenvalues()(src);
        Eigen::VectorXd z = es.eigenvectors().col(src);
        out.vectors.col(j) = D.asDiagonal() * llt.matrixU().solve(z);
      }
      normalize_columns(out.vectors, B);
      return out;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(symmetrized(A), symmetrized(B));
  if (ges.info() != Eigen::Success) throw NumericalError("generalized eigensolve failed", 0);
  out.values = ges.eigenvalues().head(k);
  out.vectors = ges.eigenvectors().leftCols(k);
  normalize_columns(out.vectors, B);
  return out;
}

double largest_pencil_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::VectorXd D = B.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(D.asDiagonal() * B * D.asDiagonal()));
  if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite", 0);
  Eigen::MatrixXd C = llt.matrixL().solve(D.asDiagonal() * A * D.asDiagonal());
  C = llt.matrixL().solve(C.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(C), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolve failed", 0);
  return es.eigenvalues().maxCoeff();
}

namespace {

SpectralResult result_shell(const DiscreteOperator& op, SolverRoute route) {
  SpectralResult r;
  r.channel = op.channel;
  r.params = op.params;
  r.route = route;
  r.grid_meta = op.grid.describe() + " scheme=" + to_string(op.scheme);
  if (op.scheme == Scheme::galerkin) r.grid_meta += " degree=" + std::to_string(op.degree);
  r.warnings = op.warnings;
  return r;
}

bool is_bound(double lambda, double mc2) { return lambda < mc2 * (1.0 - kBoundStateMargin); }

// ||r||_{B^-1}
struct DualNorm {
  bool identity;
  Eigen::LLT<Eigen::MatrixXd> llt;
  explicit DualNorm(const DiscreteOperator& op) : identity(op.identity_gram()) {
    if (!identity) llt.compute(op.gram);
  }
  double operator()(const Eigen::VectorXd& r) const {
    if (identity) return r.norm();
    return llt.matrixL().solve(r).norm();
  }
};

}  // namespace

double neumann_residual(const DiscreteOperator& op, const Eigen::VectorXd& f, double lambda) {
  const DualNorm dual(op);
  const Eigen::VectorXd r = op.shifted_matrix() * f - (lambda - op.shift()) * (op.gram * f);
  return dual(r) / std::sqrt(f.dot(op.gram * f));
}

double neumann_residual(const DiscreteOperator& op, const SpectralResult& result,
                        std::size_t index) {
  if (index >= result.eigenvalues.size()) throw DomainError("eigenpair index out of range");
  return neumann_residual(op, result.eigenvectors[index], result.eigenvalues[index]);
}

SpectralResult dense_spectrum(const DiscreteOperator& op, int k) {
  if (k < 1 || k > op.size()) throw DomainError("k must be in [1, n]");
  SpectralResult r = result_shell(op, SolverRoute::dense);
  const PencilEigen pe = lowest_pencil_eigen(op.matrix(), op.gram, k);
  if (!pe.inverted) r.warnings.push_back("operator not positive definite; direct pencil solve");
  const double mc2 = op.shift();
  const DualNorm dual(op);
  const Eigen::MatrixXd As = op.shifted_matrix();
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd x = pe.vectors.col(j);
    // shifted Rayleigh quotient avoids cancellation against mc^2
    const double shifted = x.dot(As * x) / x.dot(op.gram * x);
    const double lambda = mc2 + shifted;
    r.eigenvalues.push_back(lambda);
    r.eigenvectors.push_back(x);
    r.residuals.push_back(dual(As * x - shifted * (op.gram * x)) /
                          std::sqrt(x.dot(op.gram * x)));
    r.bound.push_back(is_bound(lambda, mc2));
  }
  return r;
}

MinimizerResult minimize_pk(const DiscreteOperator& op, int k,
                            const std::vector<Eigen::VectorXd>& prior,
                            const MinimizeOptions& options) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (static_cast<int>(prior.size()) < k - 1) throw DomainError("missing prior eigenvectors");
  const Eigen::Index n = op.size();
  const Eigen::MatrixXd As = op.shifted_matrix();
  const Eigen::MatrixXd& B = op.gram;
  const bool plain = op.identity_gram();
  const DualNorm dual(op);
  const std::size_t used = static_cast<std::size_t>(k - 1);
  std::vector<Eigen::VectorXd> Bprior;
  for (std::size_t j = 0; j < used; ++j) Bprior.push_back(B * prior[j]);

  auto bmul = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return plain ? v : B * v; };
  auto deflate = [&](Eigen::VectorXd& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < used; ++j) v -= prior[j] * Bprior[j].dot(v);
  };
  auto normalize = [&](Eigen::VectorXd& v) { v /= std::sqrt(v.dot(bmul(v))); };

  const Eigen::VectorXd kin = op.kinetic_excess.diagonal();
  const double floor = 1e-3 * std::max(1.0, op.params.Z * op.params.Z);

  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned long long>(k));
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng) / (kin(i) + floor);
  deflate(x);
  normalize(x);

  MinimizerResult res;
  auto& tr = res.trace;
  Eigen::VectorXd Ax = As * x;
  double rho = x.dot(Ax);
  Eigen::VectorXd s_prev, r_prev;
  for (int it = 0; it < options.max_iter; ++it) {
    const Eigen::VectorXd Bx = bmul(x);
    Eigen::VectorXd r = Ax - rho * Bx;
    for (std::size_t j = 0; j < used; ++j) r -= Bprior[j] * prior[j].dot(r);
    r -= Bx * x.dot(r);
    const double gnorm = dual(r);
    tr.energies.push_back(op.shift() + rho);
    tr.gradient_norms.push_back(gnorm);
    tr.multipliers.push_back(op.shift() + rho);
    if (gnorm < options.tol) {
      tr.converged = true;
      break;
    }
    const Eigen::VectorXd P = (kin.array() + std::max(-rho, floor)).matrix();
    Eigen::VectorXd d = -r.cwiseQuotient(P);
    deflate(d);
    d -= x * Bx.dot(d);
    const double dr = d.dot(r);
    if (!(dr < 0.0)) break;
    const Eigen::VectorXd Ad = As * d;
    const double dBd = d.dot(bmul(d));
    const double curv = d.dot(Ad) - rho * dBd;
    // exact change of the Rayleigh quotient along x + t d, free of cancellation
    auto change = [&](double t) { return (2.0 * t * dr + t * t * curv) / (1.0 + t * t * dBd); };

    double t = 1.0;
    if (s_prev.size() == n) {
      const double sy = s_prev.dot(r - r_prev);
      const double sPs = s_prev.dot(P.cwiseProduct(s_prev));
      if (sy > 0.0) t = std::clamp(sPs / sy, 1e-4, 1e4);
    }
    double delta = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      delta = change(t);
      if (delta <= 1e-4 * 2.0 * t * dr) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    Eigen::VectorXd xn = x + t * d;
    const double scale = std::sqrt(1.0 + t * t * dBd);
    xn /= scale;
    s_prev = xn - x;
    r_prev = r;
    x = std::move(xn);
    Ax = (Ax + t * Ad) / scale;
    rho += delta;
  }
  if (!tr.converged) {
    throw NumericalError("constrained minimization did not reach the gradient tolerance",
                         op.shift() + rho);
  }
  res.eigenvalue = op.shift() + rho;
  Eigen::Index at = 0;
  x.cwiseAbs().maxCoeff(&at);
  res.vector = x(at) < 0.0 ? Eigen::VectorXd(-x) : x;
  return res;
}

SpectralResult variational_spectrum(const DiscreteOperator& op, int k,
                                    const MinimizeOptions& options) {
  if (k < 1 || k > op.size()) throw DomainError("k must be in [1, n]");
  SpectralResult r = result_shell(op, SolverRoute::variational);
  const double mc2 = op.shift();
  for (int j = 1; j <= k; ++j) {
    MinimizerResult m = minimize_pk(op, j, r.eigenvectors, options);
    r.eigenvalues.push_back(m.eigenvalue);
    r.residuals.push_back(neumann_residual(op, m.vector, m.eigenvalue));
    r.bound.push_back(is_bound(m.eigenvalue, mc2));
    r.eigenvectors.push_back(std::move(m.vector));
    r.traces.push_back(std::move(m.trace));
  }
  return r;
}

std::vector<double> nonrel_spectrum(const RadialGrid& grid, double Z, int l, int k,
                                    Scheme scheme, int degree, double mass) {
  if (!(Z > 0.0)) throw DomainError("nonrelativistic spectrum needs Z > 0");
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  PhysParams params;
  params.Z = Z;
  params.m = mass;
  DiscreteOperator op = assemble_operator(grid, nonrel_kernel(l, Z), params, scheme, degree);
  const auto S = op.basis_scale.asDiagonal();
  op.kinetic_excess =
      S * assemble_weight_form(grid, [mass](double p) { return 0.5 * p * p / mass; }, scheme,
                               degree) *
      S;
  // lift above the Coulomb ground state so the inverse pencil applies
  const double lift = mass * Z * Z;
  const Eigen::MatrixXd A = op.shifted_matrix() + lift * op.gram;
  const PencilEigen pe = lowest_pencil_eigen(A, op.gram, k);
  std::vector<double> out;
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd x = pe.vectors.col(j);
    out.push_back(x.dot(op.shifted_matrix() * x) / x.dot(op.gram * x));
  }
  return out;
}

std::vector<BindingRow> binding_curve(const std::vector<double>& Z_values,
                                      const ChannelSpec& channel, int k, const GridSpec& grid,
                                      PhysParams base) {
  std::vector<BindingRow> rows;
  for (double Z : Z_values) {
    if (!(Z > 0.0)) throw DomainError("binding curve needs Z > 0");
    PhysParams p = base;
    p.Z = Z;
    const DiscreteOperator op = assemble_operator(grid, channel, p);
    const SpectralResult sr = dense_spectrum(op, k);
    BindingRow row;
    row.Z = Z;
    row.eigenvalues = sr.eigenvalues;
    for (double e : sr.eigenvalues) row.binding.push_back(op.shift() - e);
    row.bound = sr.bound_count();
    row.warnings = sr.warnings;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace brfw
