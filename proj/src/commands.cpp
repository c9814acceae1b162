#include "brfw/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "brfw/analysis.hpp"
#include "brfw/eigensolve.hpp"
#include "brfw/errors.hpp"
#include "brfw/extension_dtn.hpp"
#include "brfw/parallel.hpp"

namespace brfw {

namespace {

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string fmt(double x) { return format_double(x); }

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json constants_table() {
  return {{"hardy", constants::kHardy},
          {"kato", constants::kKato},
          {"tix", constants::kTix},
          {"critical_charge", constants::kCriticalCharge},
          {"stable_up_to_Z", 120.0},
          {"collapse_from_Z", 130.0}};
}

double max_offdiag_overlap(const SpectralResult& sr, const DiscreteOperator& op) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sr.eigenvectors.size(); ++i)
    for (std::size_t j = 0; j < sr.eigenvectors.size(); ++j) {
      const double g = sr.eigenvectors[i].dot(op.gram * sr.eigenvectors[j]);
      worst = std::max(worst, std::abs(i == j ? g - 1.0 : g));
    }
  return worst;
}

struct Context {
  const RunConfig& cfg;
  RunReport& report;
  Stopwatch clock;

  void violation(const std::string& s) { report.violations.push_back(s); }
  void time(const std::string& phase) { report.timings[phase] = clock.lap(); }
};

Json spectral_json(const SpectralResult& sr, const DiscreteOperator& op, Context& ctx,
                   Table& table) {
  const double mc2 = op.shift();
  const std::string route = to_string(sr.route);
  Json j;
  j["route"] = route;
  j["eigenvalues"] = numbers(sr.eigenvalues);
  std::vector<double> binding;
  for (double e : sr.eigenvalues) binding.push_back(mc2 - e);
  j["binding"] = numbers(binding);
  j["bound"] = sr.bound;
  j["bound_count"] = sr.bound_count();
  j["residuals"] = numbers(sr.residuals);
  const double overlap = max_offdiag_overlap(sr, op);
  j["orthonormality_error"] = number(overlap);
  if (sr.route == SolverRoute::variational) {
    Json its = Json::array(), conv = Json::array();
    for (const auto& t : sr.traces) {
      its.push_back(t.energies.size());
      conv.push_back(t.converged);
      if (!t.converged) ctx.violation(route + ": minimizer did not converge");
    }
    j["iterations"] = its;
    j["converged"] = conv;
  }
  j["warnings"] = sr.warnings;

  for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    table.rows.push_back({route, i + 1, number(sr.eigenvalues[i]), number(binding[i]),
                          number(sr.residuals[i]), sr.bound[i] ? "true" : "false"});
    if (!sr.bound[i]) continue;
    if (!(sr.residuals[i] < 1e-7))
      ctx.violation(route + ": Neumann residual " + fmt(sr.residuals[i]) + " for level " +
                    std::to_string(i + 1));
    if (!(sr.eigenvalues[i] > 0.0 && sr.eigenvalues[i] < mc2))
      ctx.violation(route + ": bound eigenvalue outside (0, mc^2)");
  }
  if (!(overlap < 1e-10))
    ctx.violation(route + ": eigenvectors not orthonormal (" + fmt(overlap) + ")");
  return j;
}

void run_spectrum(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  Json& res = ctx.report.results;
  const ChannelSpec channel = ChannelSpec::from_kappa(cfg.kappa);
  const DiscreteOperator op = assemble_operator(cfg.grid, channel, cfg.params);
  ctx.time("assemble");
  res["rest_energy"] = op.shift();
  res["grid"] = op.grid.describe();
  res["basis_size"] = op.size();
  res["operator_warnings"] = op.warnings;

  Table levels{"levels", {"route", "level", "eigenvalue", "binding", "residual", "bound"}, {}};
  Table traces{"traces", {"level", "iteration", "energy", "gradient_norm"}, {}};
  const int k = cfg.solver.k;
  SpectralResult dense, variational;
  const bool run_dense = cfg.solver.route != "variational";
  const bool run_var = cfg.solver.route != "dense";
  if (run_dense) {
    dense = dense_spectrum(op, k);
    ctx.time("dense");
    res["dense"] = spectral_json(dense, op, ctx, levels);
  }
  if (run_var) {
    variational = variational_spectrum(op, k, {cfg.solver.tol, cfg.solver.max_iter});
    ctx.time("variational");
    res["variational"] = spectral_json(variational, op, ctx, levels);
    for (std::size_t i = 0; i < variational.traces.size(); ++i) {
      const auto& t = variational.traces[i];
      for (std::size_t s = 0; s < t.energies.size(); ++s)
        traces.rows.push_back({i + 1, s + 1, number(t.energies[s]), number(t.gradient_norms[s])});
    }
  }
  if (run_dense && run_var) {
    double worst = 0.0;
    const std::size_t m = std::min(dense.eigenvalues.size(), variational.eigenvalues.size());
    for (std::size_t i = 0; i < m; ++i)
      worst = std::max(worst, std::abs(dense.eigenvalues[i] - variational.eigenvalues[i]));
    res["route_agreement"] = number(worst / op.shift());
    if (!(worst <= 1e-8 * op.shift()))
      ctx.violation("dense and variational eigenvalues differ by " + fmt(worst / op.shift()) +
                    " mc^2");
  }
  ctx.report.tables.push_back(std::move(levels));
  if (!traces.rows.empty()) ctx.report.tables.push_back(std::move(traces));

  if (cfg.binding_Z_values.empty()) return;
  std::vector<double> Zs = cfg.binding_Z_values;
  std::sort(Zs.begin(), Zs.end());
  const GridSpec strong = GridSpec::strong_coupling(cfg.binding_n);
  const auto rows = binding_curve(Zs, channel, k, strong, cfg.params);
  ctx.time("binding_curve");
  Table curve{"binding_curve", {"Z", "level", "eigenvalue", "binding", "bound"}, {}};
  Json jrows = Json::array();
  const double mc2 = cfg.params.rest_energy();
  double prev_lambda1 = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    jrows.push_back({{"Z", row.Z},
                     {"eigenvalues", numbers(row.eigenvalues)},
                     {"binding", numbers(row.binding)},
                     {"bound", row.bound},
                     {"warnings", row.warnings}});
    for (std::size_t i = 0; i < row.eigenvalues.size(); ++i) {
      const bool bound = i < row.bound;
      curve.rows.push_back(
          {row.Z, i + 1, number(row.eigenvalues[i]), number(row.binding[i]), bound ? "true" : "false"});
      if (!bound) continue;
      if (!(row.eigenvalues[i] > 0.0 && row.eigenvalues[i] < mc2))
        ctx.violation("binding curve: Z=" + fmt(row.Z) + " eigenvalue outside (0, mc^2)");
      if (i > 0 && !(row.binding[i] < row.binding[i - 1]))
        ctx.violation("binding curve: Z=" + fmt(row.Z) + " binding not decreasing in level");
    }
    if (row.bound == 0) ctx.violation("binding curve: no bound state at Z=" + fmt(row.Z));
    if (!row.eigenvalues.empty()) {
      if (!(row.eigenvalues[0] < prev_lambda1))
        ctx.violation("binding curve: lowest eigenvalue not decreasing at Z=" + fmt(row.Z));
      prev_lambda1 = row.eigenvalues[0];
    }
  }
  res["binding_curve"] = {{"grid", "galerkin degree 5, graded log, n=" + std::to_string(cfg.binding_n)},
                          {"rows", jrows}};
  ctx.report.tables.push_back(std::move(curve));
}

Json max_of(const std::vector<double>& v) {
  return v.empty() ? Json(nullptr) : number(*std::max_element(v.begin(), v.end()));
}
Json min_of(const std::vector<double>& v) {
  return v.empty() ? Json(nullptr) : number(*std::min_element(v.begin(), v.end()));
}

void run_dtn_check(Context& ctx) {
  const DtnCheckReport r = dtn_consistency_check(ctx.cfg.extension, ctx.cfg.params);
  ctx.time("dtn_check");
  Json& res = ctx.report.results;
  res["energy_rel_diff_max"] = max_of(r.energy_rel_diff);
  res["richardson_rel_max"] = max_of(r.richardson_rel);
  res["minimality_gap_min"] = min_of(r.minimality_gap);
  res["cross_term_rel_max"] = max_of(r.cross_term_rel);
  res["trace_margin_rel_min"] = min_of(r.trace_margin_rel);
  res["equality_margin_rel"] = number(r.equality_margin_rel);
  res["warnings"] = r.warnings;

  Table t{"trials", {"check", "trial", "value"}, {}};
  auto add = [&](const char* name, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({name, i + 1, number(v[i])});
  };
  add("energy_rel_diff", r.energy_rel_diff);
  add("richardson_rel", r.richardson_rel);
  add("minimality_gap", r.minimality_gap);
  add("cross_term_rel", r.cross_term_rel);
  add("trace_margin_rel", r.trace_margin_rel);
  ctx.report.tables.push_back(std::move(t));

  for (double v : r.energy_rel_diff)
    if (!(v < 1e-7)) ctx.violation("two-route energy disagreement " + fmt(v));
  for (double v : r.richardson_rel)
    if (!(v < 1e-8)) ctx.violation("Richardson DtN residual " + fmt(v));
  for (double v : r.minimality_gap)
    if (!(v >= -1e-10)) ctx.violation("zero-trace perturbation lowered the energy: " + fmt(v));
  for (double v : r.trace_margin_rel)
    if (!(v >= -1e-10)) ctx.violation("trace inequality margin " + fmt(v));
  if (!(r.equality_margin_rel < 1e-10))
    ctx.violation("equality case margin " + fmt(r.equality_margin_rel));
}

Json inequality_json(const InequalityReport& r, double lower) {
  return {{"name", r.name},
          {"family", r.family},
          {"max_ratio", number(r.max_ratio)},
          {"theoretical_constant", number(r.theoretical_constant)},
          {"margin", number(r.margin)},
          {"lower_window", lower},
          {"sample_count", r.sample_count},
          {"within_bound", r.within_bound()}};
}

void run_inequalities(Context& ctx) {
  const auto& c = ctx.cfg.inequalities;
  const std::vector<std::pair<InequalityReport, double>> reports = {
      {hardy_check(c.hardy_alphas), 1.8},
      {kato_check(inequality_grid(c.n)), 1.45},
      {tix_check(c.tix_kappas, ctx.cfg.params, c.n), 1.0}};
  ctx.time("inequalities");
  Json arr = Json::array();
  Table t{"ratios", {"inequality", "sample", "ratio"}, {}};
  for (const auto& [r, lower] : reports) {
    arr.push_back(inequality_json(r, lower));
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
      t.rows.push_back({r.name, i < r.labels.size() ? r.labels[i] : std::to_string(i + 1),
                        number(r.ratios[i])});
    if (!r.within_bound() || !(r.margin >= 0.0))
      ctx.violation(r.name + ": sup " + fmt(r.max_ratio) + " exceeds " +
                    fmt(r.theoretical_constant));
    if (!(r.max_ratio >= lower))
      ctx.violation(r.name + ": sup " + fmt(r.max_ratio) + " below the window " + fmt(lower));
  }
  ctx.report.results["reports"] = arr;
  ctx.report.tables.push_back(std::move(t));
}

void run_commutator(Context& ctx) {
  const CommutatorDecayReport r = commutator_decay(ctx.cfg.commutator, ctx.cfg.params);
  ctx.time("commutator");
  Json& res = ctx.report.results;
  res["R_values"] = numbers(r.R_values);
  res["norms"] = numbers(r.norms);
  res["fitted_slope"] = number(r.fitted_slope);
  res["fit_residual"] = number(r.fit_residual);
  res["flagged"] = r.flagged;
  Table t{"norms", {"R", "norm"}, {}};
  for (std::size_t i = 0; i < r.norms.size(); ++i)
    t.rows.push_back({number(r.R_values[i]), number(r.norms[i])});
  ctx.report.tables.push_back(std::move(t));
  if (!(r.fitted_slope >= -1.15 && r.fitted_slope <= -0.85))
    ctx.violation("commutator slope " + fmt(r.fitted_slope) + " outside [-1.15, -0.85]");
  if (!(r.fit_residual < 0.1)) ctx.violation("commutator fit residual " + fmt(r.fit_residual));
}

void run_scaling(Context& ctx) {
  const ScalingLimitReport r = scaling_limit(ctx.cfg.scaling, ctx.cfg.params);
  ctx.time("scaling");
  Json& res = ctx.report.results;
  std::vector<double> normalized;
  for (std::size_t i = 0; i < r.eta_values.size(); ++i)
    normalized.push_back(r.form_values[i] / (r.eta_values[i] * r.eta_values[i]));
  const double rel = std::abs(r.leading_coefficient - r.reference_coefficient) /
                     std::abs(r.reference_coefficient);
  res["eta_values"] = numbers(r.eta_values);
  res["form_values"] = numbers(r.form_values);
  res["normalized_form"] = numbers(normalized);
  res["leading_coefficient"] = number(r.leading_coefficient);
  res["reference_coefficient"] = number(r.reference_coefficient);
  res["leading_rel_error"] = number(rel);
  res["remainder_coefficient"] = number(r.remainder_coefficient);
  res["remainder_exponent"] = number(r.remainder_exponent);
  res["flagged"] = r.flagged;
  Table t{"forms", {"eta", "form", "normalized_form"}, {}};
  for (std::size_t i = 0; i < r.eta_values.size(); ++i)
    t.rows.push_back({number(r.eta_values[i]), number(r.form_values[i]), number(normalized[i])});
  ctx.report.tables.push_back(std::move(t));

  if (!(rel <= 0.02)) ctx.violation("leading coefficient off by " + fmt(rel));
  if (!(r.remainder_exponent >= 1.7))
    ctx.violation("remainder exponent " + fmt(r.remainder_exponent) + " below 1.7");
  std::vector<std::size_t> order(r.eta_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return r.eta_values[a] > r.eta_values[b]; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!(normalized[order[i]] < 0.0)) ctx.violation("normalized form not negative");
    if (i > 0 && !(normalized[order[i]] < normalized[order[i - 1]]))
      ctx.violation("normalized form not monotonically decreasing as eta shrinks");
  }
}

void run_critical(Context& ctx) {
  const auto rows = critical_coupling_scan(ctx.cfg.critical, ctx.cfg.params);
  ctx.time("critical_scan");
  Json arr = Json::array();
  Table t{"lambda1", {"Z", "n", "lambda1_over_mc2"}, {}};
  for (const auto& r : rows) {
    arr.push_back({{"Z", r.Z},
                   {"n_values", r.n_values},
                   {"lambda1", numbers(r.lambda1)},
                   {"variation", number(r.variation)},
                   {"drop", number(r.drop)},
                   {"stable", r.stable},
                   {"collapsing", r.collapsing}});
    for (std::size_t i = 0; i < r.lambda1.size(); ++i)
      t.rows.push_back({r.Z, r.n_values[i], number(r.lambda1[i])});
    if (r.Z <= 120.0 && !(r.stable && r.lambda1.back() > 0.0))
      ctx.violation("Z=" + fmt(r.Z) + ": lowest eigenvalue not refinement-stable");
    if (r.Z >= 130.0 && !r.collapsing)
      ctx.violation("Z=" + fmt(r.Z) + ": no collapse signature");
  }
  ctx.report.results["rows"] = arr;
  ctx.report.tables.push_back(std::move(t));
}

void run_nonrel(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const auto& nr = cfg.nonrel;
  const double m = cfg.params.m;
  Json schr = Json::array();
  Table t{"levels", {"model", "Z", "l", "n", "value", "reference", "error"}, {}};
  for (double Z : nr.Z_values) {
    GridSpec g = cfg.grid;
    g.n = nr.n;
    const RadialGrid grid = g.build(Z);
    for (int l : nr.l_values) {
      const auto ev = nonrel_spectrum(grid, Z, l, nr.k, g.scheme, g.degree, m);
      std::vector<double> ref, err;
      for (std::size_t i = 0; i < ev.size(); ++i) {
        const double n = static_cast<double>(l) + 1.0 + static_cast<double>(i);
        ref.push_back(-m * Z * Z / (2.0 * n * n));
        err.push_back(std::abs(ev[i] - ref.back()));
        t.rows.push_back({"schrodinger", Z, l, n, number(ev[i]), number(ref.back()),
                          number(err.back())});
        if (!(err.back() <= nr.tolerance * Z * Z))
          ctx.violation("Schrodinger Z=" + fmt(Z) + " l=" + std::to_string(l) + " n=" +
                        fmt(n) + " error " + fmt(err.back()));
      }
      schr.push_back({{"Z", Z}, {"l", l}, {"eigenvalues", numbers(ev)},
                      {"reference", numbers(ref)}, {"errors", numbers(err)}});
    }
  }
  ctx.time("schrodinger");
  ctx.report.results["schrodinger"] = schr;

  const double Z = cfg.params.Z;
  const DiscreteOperator op =
      assemble_operator(cfg.grid, ChannelSpec::from_kappa(cfg.kappa), cfg.params);
  const SpectralResult sr = dense_spectrum(op, nr.k);
  ctx.time("relativistic");
  const int l = ChannelSpec::from_kappa(cfg.kappa).l_up;
  std::vector<double> binding, ref, err, tol;
  for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    const double n = static_cast<double>(l) + 1.0 + static_cast<double>(i);
    binding.push_back(op.shift() - sr.eigenvalues[i]);
    ref.push_back(m * Z * Z / (2.0 * n * n));
    err.push_back(std::abs(binding.back() - ref.back()));
    tol.push_back((i == 0 ? 1e-3 : 5e-4) * Z * Z);
    t.rows.push_back({"relativistic", Z, l, n, number(binding.back()), number(ref.back()),
                      number(err.back())});
    if (!(err.back() <= tol.back()))
      ctx.violation("relativistic binding level " + std::to_string(i + 1) + " error " +
                    fmt(err.back()));
  }
  ctx.report.results["relativistic"] = {{"Z", Z},
                                        {"kappa", cfg.kappa},
                                        {"binding", numbers(binding)},
                                        {"reference", numbers(ref)},
                                        {"errors", numbers(err)},
                                        {"tolerances", numbers(tol)},
                                        {"warnings", sr.warnings}};
  ctx.report.tables.push_back(std::move(t));
}

const std::map<std::string, std::function<void(Context&)>>& dispatch() {
  static const std::map<std::string, std::function<void(Context&)>> table = {
      {"spectrum", run_spectrum},
      {"dtn-check", run_dtn_check},
      {"inequalities", run_inequalities},
      {"commutator-decay", run_commutator},
      {"scaling-limit", run_scaling},
      {"critical-scan", run_critical},
      {"nonrel-limit", run_nonrel}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum",      "dtn-check",        "inequalities",
                                                 "commutator-decay", "scaling-limit", "critical-scan",
                                                 "nonrel-limit"};
  return names;
}

RunReport run_command(const std::string& command, const RunConfig& config) {
  const auto& table = dispatch();
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("command", "unknown command '" + command + "'");
  RunReport report;
  report.command = command;
  report.config = config.tree;
  report.constants = constants_table();
  report.results = Json::object();
  report.timings = Json::object();
  Context ctx{config, report, {}};
  try {
    it->second(ctx);
  } catch (const NumericalError& e) {
    report.errors.push_back(std::string("numerical error: ") + e.what() +
                            " (best estimate " + format_double(e.best_estimate()) + ")");
  } catch (const ConfigError& e) {
    report.errors.push_back(std::string("configuration error: ") + e.what());
  } catch (const DomainError& e) {
    report.errors.push_back(std::string("domain error: ") + e.what());
  } catch (const std::exception& e) {
    report.errors.push_back(std::string("error: ") + e.what());
  }
  report.timings["threads"] = worker_count();
  seal(report);
  return report;
}

}  // namespace brfw
