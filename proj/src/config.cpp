#include "brfw/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "brfw/errors.hpp"

namespace brfw {

Json default_config_tree() {
  const RunConfig d;
  Json t;
  t["params"] = {{"c", d.params.c}, {"m", d.params.m}, {"Z", d.params.Z}};
  t["channel"] = {{"kappa", d.kappa}};
  t["grid"] = {{"n", d.grid.n},
               {"s", d.grid.s},
               {"mapping", to_string(d.grid.mapping)},
               {"lower", d.grid.lower},
               {"upper", d.grid.upper},
               {"grading", d.grid.grading},
               {"extent", d.grid.extent},
               {"scheme", to_string(d.grid.scheme)},
               {"degree", d.grid.degree}};
  t["solver"] = {{"route", d.solver.route},
                 {"k", d.solver.k},
                 {"tol", d.solver.tol},
                 {"max_iter", d.solver.max_iter}};
  t["binding"] = {{"Z_values", d.binding_Z_values}, {"n", d.binding_n}};
  t["critical"] = {{"Z_values", d.critical.Z_values},
                   {"n_values", d.critical.n_values},
                   {"stability_tol", d.critical.stability_tol},
                   {"collapse_drop", d.critical.collapse_drop},
                   {"cutoff_growth", d.critical.cutoff_growth}};
  t["commutator"] = {{"R_values", d.commutator.R_values},
                     {"n", d.commutator.n},
                     {"s", d.commutator.s},
                     {"profile", d.commutator.profile.kind}};
  t["scaling"] = {{"eta_values", d.scaling.eta_values}, {"n", d.scaling.n}};
  t["inequalities"] = {{"n", d.inequalities.n},
                       {"hardy_alphas", d.inequalities.hardy_alphas},
                       {"tix_kappas", d.inequalities.tix_kappas}};
  t["extension"] = {{"n", d.extension.n},
                    {"s", d.extension.s},
                    {"samples", d.extension.samples},
                    {"perturbations", d.extension.perturbations},
                    {"seed", d.extension.seed},
                    {"x_panels", d.extension.x_panels},
                    {"x_points", d.extension.x_points},
                    {"richardson_step", d.extension.richardson_step}};
  t["nonrel"] = {{"Z_values", d.nonrel.Z_values},
                 {"l_values", d.nonrel.l_values},
                 {"k", d.nonrel.k},
                 {"n", d.nonrel.n},
                 {"tolerance", d.nonrel.tolerance}};
  t["output"] = {{"directory", d.output.directory}, {"formats", d.output.formats}};
  return t;
}

namespace {

bool compatible(const Json& target, const Json& value) {
  if (target.is_number_integer()) return value.is_number_integer();
  if (target.is_number()) return value.is_number();
  if (target.is_string()) return value.is_string();
  if (target.is_boolean()) return value.is_boolean();
  if (target.is_array()) {
    if (!value.is_array()) return false;
    for (const auto& e : value)
      if (!(e.is_number() || e.is_string())) return false;
    return true;
  }
  return false;
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

}  // namespace

void merge_config(Json& base, const Json& overrides, const std::string& prefix) {
  if (!overrides.is_object())
    throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    const std::string path = join(prefix, it.key());
    if (!base.contains(it.key())) throw ConfigError(path, "unknown key");
    Json& target = base[it.key()];
    if (target.is_object()) {
      merge_config(target, it.value(), path);
      continue;
    }
    if (!compatible(target, it.value()))
      throw ConfigError(path, "type mismatch (expected " + std::string(target.type_name()) + ")");
    if (target.is_number_float() && it.value().is_number_integer())
      target = it.value().get<double>();
    else
      target = it.value();
  }
}

void apply_override(Json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  Json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    Json wrap;
    wrap[*it] = patch;
    patch = wrap;
  }
  merge_config(tree, patch);
}

namespace {

template <class T>
std::vector<T> list_of(const Json& j, const std::string& key) {
  std::vector<T> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(key, "expected numeric entries");
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) throw ConfigError(key, "expected integer entries");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

RunConfig config_from_tree(const Json& tree) {
  RunConfig c;
  c.tree = tree;
  const Json& p = tree.at("params");
  c.params.c = p.at("c").get<double>();
  c.params.m = p.at("m").get<double>();
  c.params.Z = p.at("Z").get<double>();
  require(c.params.c > 0.0, "params.c", "must be > 0");
  require(c.params.m > 0.0, "params.m", "must be > 0");
  require(c.params.Z >= 0.0, "params.Z", "must be >= 0");

  c.kappa = tree.at("channel").at("kappa").get<int>();
  require(c.kappa != 0 && std::abs(c.kappa) <= kMaxOrbital, "channel.kappa",
          "must be nonzero with |kappa| <= 3");

  const Json& g = tree.at("grid");
  c.grid.n = g.at("n").get<int>();
  require(c.grid.n >= 16, "grid.n", "n >= 16 required");
  c.grid.s = g.at("s").get<double>();
  c.grid.mapping = mapping_from_string(g.at("mapping").get<std::string>());
  c.grid.lower = g.at("lower").get<double>();
  c.grid.upper = g.at("upper").get<double>();
  c.grid.grading = g.at("grading").get<double>();
  c.grid.extent = g.at("extent").get<double>();
  c.grid.scheme = scheme_from_string(g.at("scheme").get<std::string>());
  c.grid.degree = g.at("degree").get<int>();
  require(c.grid.degree >= 1 && c.grid.degree <= 6, "grid.degree", "must be in [1, 6]");

  const Json& s = tree.at("solver");
  c.solver.route = s.at("route").get<std::string>();
  require(c.solver.route == "dense" || c.solver.route == "variational" || c.solver.route == "both",
          "solver.route", "must be dense, variational or both");
  c.solver.k = s.at("k").get<int>();
  require(c.solver.k >= 1, "solver.k", "k >= 1 required");
  c.solver.tol = s.at("tol").get<double>();
  require(c.solver.tol > 0.0, "solver.tol", "must be > 0");
  c.solver.max_iter = s.at("max_iter").get<int>();
  require(c.solver.max_iter >= 1, "solver.max_iter", "must be >= 1");

  c.binding_Z_values = list_of<double>(tree.at("binding").at("Z_values"), "binding.Z_values");
  for (double z : c.binding_Z_values) require(z > 0.0, "binding.Z_values", "entries must be > 0");
  c.binding_n = tree.at("binding").at("n").get<int>();
  require(c.binding_n >= 16, "binding.n", "n >= 16 required");

  const Json& cr = tree.at("critical");
  c.critical.Z_values = list_of<double>(cr.at("Z_values"), "critical.Z_values");
  c.critical.n_values = list_of<int>(cr.at("n_values"), "critical.n_values");
  require(!c.critical.n_values.empty(), "critical.n_values", "must not be empty");
  for (int n : c.critical.n_values) require(n >= 16, "critical.n_values", "n >= 16 required");
  c.critical.stability_tol = cr.at("stability_tol").get<double>();
  c.critical.collapse_drop = cr.at("collapse_drop").get<double>();
  c.critical.cutoff_growth = cr.at("cutoff_growth").get<double>();
  c.critical.kappa = c.kappa;

  const Json& cm = tree.at("commutator");
  c.commutator.R_values = list_of<double>(cm.at("R_values"), "commutator.R_values");
  c.commutator.n = cm.at("n").get<int>();
  require(c.commutator.n >= 16, "commutator.n", "n >= 16 required");
  c.commutator.s = cm.at("s").get<double>();
  require(c.commutator.s > 0.0, "commutator.s", "must be > 0");
  c.commutator.profile.kind = cm.at("profile").get<std::string>();
  require(c.commutator.profile.kind == "gaussian", "commutator.profile",
          "only the gaussian profile is supported");
  c.commutator.kappa = c.kappa;

  const Json& sc = tree.at("scaling");
  c.scaling.eta_values = list_of<double>(sc.at("eta_values"), "scaling.eta_values");
  c.scaling.n = sc.at("n").get<int>();
  require(c.scaling.n >= 16, "scaling.n", "n >= 16 required");
  c.scaling.Z = c.params.Z;
  c.scaling.kappa = c.kappa;

  const Json& iq = tree.at("inequalities");
  c.inequalities.n = iq.at("n").get<int>();
  require(c.inequalities.n >= 16, "inequalities.n", "n >= 16 required");
  c.inequalities.hardy_alphas = list_of<double>(iq.at("hardy_alphas"), "inequalities.hardy_alphas");
  for (double a : c.inequalities.hardy_alphas)
    require(a > -0.5, "inequalities.hardy_alphas", "entries must be > -1/2");
  c.inequalities.tix_kappas = list_of<int>(iq.at("tix_kappas"), "inequalities.tix_kappas");

  const Json& ex = tree.at("extension");
  c.extension.n = ex.at("n").get<int>();
  require(c.extension.n >= 16, "extension.n", "n >= 16 required");
  c.extension.s = ex.at("s").get<double>();
  require(c.extension.s > 0.0, "extension.s", "must be > 0");
  c.extension.samples = ex.at("samples").get<int>();
  c.extension.perturbations = ex.at("perturbations").get<int>();
  require(c.extension.samples >= 1, "extension.samples", "must be >= 1");
  require(c.extension.perturbations >= 1, "extension.perturbations", "must be >= 1");
  require(ex.at("seed").get<std::int64_t>() >= 0, "extension.seed", "must be >= 0");
  c.extension.seed = ex.at("seed").get<std::uint64_t>();
  c.extension.x_panels = ex.at("x_panels").get<int>();
  c.extension.x_points = ex.at("x_points").get<int>();
  require(c.extension.x_panels >= 1 && c.extension.x_points >= 1, "extension.x_panels",
          "x-grid needs at least one panel and point");
  c.extension.richardson_step = ex.at("richardson_step").get<double>();
  require(c.extension.richardson_step > 0.0, "extension.richardson_step", "must be > 0");

  const Json& nr = tree.at("nonrel");
  c.nonrel.Z_values = list_of<double>(nr.at("Z_values"), "nonrel.Z_values");
  for (double z : c.nonrel.Z_values) require(z > 0.0, "nonrel.Z_values", "entries must be > 0");
  c.nonrel.l_values = list_of<int>(nr.at("l_values"), "nonrel.l_values");
  for (int l : c.nonrel.l_values)
    require(l >= 0 && l <= kMaxOrbital, "nonrel.l_values", "entries must be in [0, 3]");
  c.nonrel.k = nr.at("k").get<int>();
  require(c.nonrel.k >= 1, "nonrel.k", "k >= 1 required");
  c.nonrel.n = nr.at("n").get<int>();
  require(c.nonrel.n >= 16, "nonrel.n", "n >= 16 required");
  c.nonrel.tolerance = nr.at("tolerance").get<double>();

  const Json& out = tree.at("output");
  c.output.directory = out.at("directory").get<std::string>();
  c.output.formats.clear();
  for (const auto& f : out.at("formats")) {
    require(f.is_string() && (f == "json" || f == "csv"), "output.formats",
            "entries must be json or csv");
    c.output.formats.push_back(f.get<std::string>());
  }
  return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json tree = default_config_tree();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    Json file = Json::parse(in, nullptr, false);
    if (file.is_discarded()) throw ConfigError("--config", "invalid JSON in '" + path + "'");
    merge_config(tree, file);
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return config_from_tree(tree);
}

}  // namespace brfw
