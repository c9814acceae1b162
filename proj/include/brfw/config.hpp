#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "brfw/analysis.hpp"
#include "brfw/discretization.hpp"
#include "brfw/eigensolve.hpp"
#include "brfw/extension_dtn.hpp"

namespace brfw {

using Json = nlohmann::ordered_json;

struct SolverConfig {
  std::string route = "both";  // dense | variational | both
  int k = 4;
  double tol = 1e-10;
  int max_iter = 20000;
};

using ExtensionConfig = DtnCheckOptions;

struct InequalityConfig {
  int n = 300;
  std::vector<double> hardy_alphas{0.0, -0.1, -0.2, -0.3, -0.35, -0.4, -0.42};
  std::vector<int> tix_kappas{-1, 1};
};

struct NonrelConfig {
  std::vector<double> Z_values{1.0, 2.0};
  std::vector<int> l_values{0, 1};
  int k = 3;
  int n = 300;
  double tolerance = 1e-5;  // per unit Z^2
};

struct OutputConfig {
  std::string directory;  // empty: no files
  std::vector<std::string> formats{"json"};
};

struct RunConfig {
  PhysParams params;
  int kappa = -1;
  GridSpec grid;
  SolverConfig solver;
  std::vector<double> binding_Z_values;
  int binding_n = 200;  // strong-coupling grid resolution for the binding curve
  CriticalScanOptions critical;
  CommutatorOptions commutator;
  ScalingOptions scaling;
  InequalityConfig inequalities;
  ExtensionConfig extension;
  NonrelConfig nonrel;
  OutputConfig output;
  Json tree;  // normalized configuration, echoed into reports
};

/// Configuration tree with every key at its default value.
Json default_config_tree();
/// Overlay `overrides` onto `base`; unknown keys and type mismatches throw ConfigError.
void merge_config(Json& base, const Json& overrides, const std::string& prefix = "");
/// Apply "dot.path=value"; the value is parsed as JSON when possible, else taken as a string.
void apply_override(Json& tree, const std::string& assignment);
/// Validate a tree and convert it into a RunConfig.
RunConfig config_from_tree(const Json& tree);
/// Defaults, then the optional file, then overrides in order.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace brfw
