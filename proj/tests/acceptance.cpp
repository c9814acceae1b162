#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "brfw/analysis.hpp"
#include "brfw/commands.hpp"
#include "brfw/config.hpp"
#include "brfw/report.hpp"

using namespace brfw;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<RunReport> produced;

RunReport run(const std::string& command, const std::vector<std::string>& overrides = {}) {
  RunReport r = run_command(command, parse_config("", overrides));
  produced.push_back(r);
  return r;
}

double num(const Json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

std::vector<double> nums(const Json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(num(e));
  return v;
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool clean(const RunReport& r, std::string& detail) {
  if (r.errors.empty()) return true;
  detail = "module error: " + r.errors.front();
  return false;
}

Outcome fw_algebra() {
  const AlgebraScan s = fw_algebra_scan(1000, 2024);
  Outcome o;
  o.pass = s.samples == 1000 && s.unitarity < 1e-12 && s.diagonalization < 1e-11 &&
           s.projector < 1e-12;
  o.detail = "unitarity " + g(s.unitarity) + ", diagonalization/lambda " + g(s.diagonalization) +
             ", projector " + g(s.projector) + ", block form " + g(s.block_form);
  return o;
}

Outcome pointwise_bounds() {
  const BoundScan s = pointwise_bound_scan(10000, 2025);
  Outcome o;
  const double cap = 1.0 + 1e-10;
  o.pass = s.samples == 10000 && s.kernel_ratio <= cap && s.a_plus_ratio <= cap &&
           s.a_minus_ratio <= cap;
  o.detail = "kernel " + g(s.kernel_ratio) + ", a+ " + g(s.a_plus_ratio) + ", a- " +
             g(s.a_minus_ratio) + " (ratios to the bounds)";
  return o;
}

Outcome commutator() {
  const RunReport r = run("commutator-decay");
  Outcome o;
  if (!clean(r, o.detail)) return o;
  const double slope = num(r.results["fitted_slope"]);
  const double resid = num(r.results["fit_residual"]);
  const auto R = nums(r.results["R_values"]);
  o.pass = slope >= -1.15 && slope <= -0.85 && resid < 0.1 && R.front() == 2.0 && R.back() == 64.0 &&
           r.config["commutator"]["n"] == 160;
  o.detail = "slope " + g(slope) + ", rms log residual " + g(resid);
  return o;
}

Outcome extension_identities() {
  const RunReport r = run("dtn-check");
  Outcome o;
  if (!clean(r, o.detail)) return o;
  std::size_t energies = 0, perturbations = 0;
  bool ok = true;
  double worst_energy = 0.0, worst_fd = 0.0, min_gap = INFINITY;
  for (const auto& t : r.tables)
    for (const auto& row : t.rows) {
      const std::string kind = row[0].get<std::string>();
      const double v = num(row[2]);
      if (kind == "energy_rel_diff") {
        ++energies;
        worst_energy = std::max(worst_energy, v);
        ok = ok && v < 1e-7;
      } else if (kind == "minimality_gap") {
        ++perturbations;
        min_gap = std::min(min_gap, v);
        ok = ok && v >= 0.0;
      } else if (kind == "richardson_rel") {
        worst_fd = std::max(worst_fd, v);
        ok = ok && v < 1e-8;
      }
    }
  o.pass = ok && energies == 20 && perturbations == 50;
  o.detail = "energy agreement " + g(worst_energy) + " over " + std::to_string(energies) +
             " data, min minimality gap " + g(min_gap) + " over " + std::to_string(perturbations) +
             " perturbations, Richardson " + g(worst_fd);
  return o;
}

Outcome trace_inequality() {
  const RunReport& r = produced.back();
  Outcome o;
  if (r.command != "dtn-check" || !clean(r, o.detail)) return o;
  std::size_t trials = 0;
  bool ok = true;
  double worst = INFINITY;
  for (const auto& t : r.tables)
    for (const auto& row : t.rows)
      if (row[0] == "trace_margin_rel") {
        ++trials;
        worst = std::min(worst, num(row[2]));
        ok = ok && num(row[2]) >= -1e-10;
      }
  const double eq = num(r.results["equality_margin_rel"]);
  o.pass = ok && trials == 50 && eq < 1e-10;
  o.detail = "min margin/scale " + g(worst) + " over " + std::to_string(trials) +
             " extensions, equality case " + g(eq);
  return o;
}

Outcome nonrel_limit() {
  const RunReport r = run("nonrel-limit", {"params.c=137.035999", "grid.n=200"});
  Outcome o;
  if (!clean(r, o.detail)) return o;
  const auto binding = nums(r.results["relativistic"]["binding"]);
  const double tol[] = {1e-3, 5e-4, 5e-4};
  bool ok = binding.size() >= 3;
  std::string d;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, binding.size()); ++i) {
    const double n = static_cast<double>(i + 1);
    const double err = std::abs(binding[i] - 1.0 / (2 * n * n));
    ok = ok && err <= tol[i];
    d += (i ? ", " : "") + std::string("n=") + std::to_string(i + 1) + " error " + g(err);
  }
  o.pass = ok;
  o.detail = d;
  return o;
}

Outcome variational_route() {
  const RunReport r = run("spectrum", {"solver.k=5", "solver.route=both"});
  Outcome o;
  if (!clean(r, o.detail)) return o;
  const auto& res = r.results;
  const double mc2 = num(res["rest_energy"]);
  const auto dense = nums(res["dense"]["eigenvalues"]);
  const auto var = nums(res["variational"]["eigenvalues"]);
  double diff = 0.0, resid = 0.0;
  for (std::size_t i = 0; i < dense.size() && i < var.size(); ++i)
    diff = std::max(diff, std::abs(dense[i] - var[i]) / mc2);
  for (const char* route : {"dense", "variational"})
    for (double x : nums(res[route]["residuals"])) resid = std::max(resid, x);
  const double orth = num(res["variational"]["orthonormality_error"]);
  o.pass = dense.size() == 5 && var.size() == 5 && diff <= 1e-8 && orth < 1e-10 && resid < 1e-7;
  o.detail = "max |dense - variational| " + g(diff) + " mc^2, orthogonality " + g(orth) +
             ", Neumann residual " + g(resid);
  return o;
}

Outcome spectral_bounds() {
  const RunReport r =
      run("spectrum", {"solver.route=dense", "binding.Z_values=[1,10,50,100,120]", "solver.k=4"});
  Outcome o;
  if (!clean(r, o.detail)) return o;
  const double mc2 = num(r.results["rest_energy"]);
  bool ok = true;
  double prev = INFINITY;
  std::size_t rows = 0;
  std::string d;
  for (const auto& row : r.results["binding_curve"]["rows"]) {
    ++rows;
    const auto ev = nums(row["eigenvalues"]);
    const auto b = nums(row["binding"]);
    const std::size_t bound = row["bound"].get<std::size_t>();
    ok = ok && bound >= 2 && ev[0] < prev;
    prev = ev[0];
    for (std::size_t i = 0; i < bound; ++i) {
      ok = ok && ev[i] > 0.0 && ev[i] < mc2;
      if (i) ok = ok && b[i] < b[i - 1];
    }
    d += (rows > 1 ? ", " : "") + std::string("Z=") + g(num(row["Z"])) + ": lambda1/mc2 " +
         g(ev[0] / mc2) + " (" + std::to_string(bound) + " bound)";
  }
  o.pass = ok && rows == 5;
  o.detail = d;
  return o;
}

Outcome inequality_constants() {
  const RunReport r = run("inequalities");
  Outcome o;
  if (!clean(r, o.detail)) return o;
  struct Window {
    double upper, lower;
  };
  const std::map<std::string, Window> windows = {
      {"hardy", {2.0, 1.8}}, {"kato", {std::numbers::pi / 2, 1.45}}, {"tix", {1.103708, 1.0}}};
  bool ok = r.results["reports"].size() == 3;
  std::string d;
  for (const auto& rep : r.results["reports"]) {
    const std::string name = rep["name"].get<std::string>();
    const double sup = num(rep["max_ratio"]);
    const Window w = windows.at(name);
    ok = ok && sup <= w.upper && sup >= w.lower && num(rep["margin"]) >= 0.0;
    d += (d.empty() ? "" : ", ") + name + " " + g(sup);
  }
  o.pass = ok;
  o.detail = d;
  return o;
}

Outcome critical_coupling() {
  const RunReport r = run("critical-scan", {"critical.Z_values=[120,130]"});
  Outcome o;
  if (!clean(r, o.detail)) return o;
  bool stable120 = false, collapse130 = false;
  std::string d;
  for (const auto& row : r.results["rows"]) {
    const double Z = num(row["Z"]);
    const auto lam = nums(row["lambda1"]);
    const double variation = num(row["variation"]);
    bool monotone = true;
    for (std::size_t i = 1; i < lam.size(); ++i) monotone = monotone && lam[i] < lam[i - 1];
    if (Z == 120.0) stable120 = variation < 1e-4 && lam.back() > 0.0;
    if (Z == 130.0) collapse130 = monotone && lam.front() - lam.back() > 0.05;
    d += (d.empty() ? "" : "; ") + std::string("Z=") + g(Z) + " lambda1/mc2 " + g(lam.front()) +
         " -> " + g(lam.back());
  }
  o.pass = stable120 && collapse130;
  o.detail = d;
  return o;
}

Outcome scaling() {
  const RunReport r = run("scaling-limit");
  Outcome o;
  if (!clean(r, o.detail)) return o;
  const double A = num(r.results["leading_coefficient"]);
  const double ref = 2.0 / std::sqrt(std::numbers::pi);
  const double e = num(r.results["remainder_exponent"]);
  const auto eta = nums(r.results["eta_values"]);
  const auto form = nums(r.results["form_values"]);
  bool diverging = eta.size() >= 3;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double nf = form[i] / (eta[i] * eta[i]);
    diverging = diverging && nf < 0.0;
    if (i) {
      const double prev = form[i - 1] / (eta[i - 1] * eta[i - 1]);
      diverging = diverging && eta[i] < eta[i - 1] && nf < prev;
    }
  }
  const double rel = std::abs(A - ref) / ref;
  o.pass = rel <= 0.02 && e >= 1.7 && diverging;
  o.detail = "leading coefficient " + g(A) + " vs " + g(ref) + " (rel " + g(rel) +
             "), remainder exponent " + g(e) + ", normalized form " +
             g(form.front() / (eta.front() * eta.front())) + " -> " +
             g(form.back() / (eta.back() * eta.back()));
  return o;
}

Outcome determinism() {
  const RunReport a = run_command("inequalities", parse_config("", {}));
  const RunReport b = run_command("inequalities", parse_config("", {}));
  bool ok = a.content_hash == b.content_hash && a.input_hash == b.input_hash;
  std::size_t round_trips = 0;
  for (const auto& r : produced) {
    const RunReport back = parse_report(serialize_report(r));
    ok = ok && back == r && serialize_report(back) == serialize_report(r);
    ++round_trips;
  }
  Outcome o;
  o.pass = ok && round_trips >= 8;
  o.detail = "hash " + a.content_hash + " twice, " + std::to_string(round_trips) +
             " reports round-tripped";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"FW algebra", fw_algebra},
      {"pointwise kernel and coefficient bounds", pointwise_bounds},
      {"commutator decay", commutator},
      {"extension identities", extension_identities},
      {"trace inequality", trace_inequality},
      {"nonrelativistic limit", nonrel_limit},
      {"variational route equivalence", variational_route},
      {"spectral bounds", spectral_bounds},
      {"inequality constants", inequality_constants},
      {"critical coupling", critical_coupling},
      {"scaling limit", scaling},
      {"determinism and serialization", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s | %s | %.2f s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
