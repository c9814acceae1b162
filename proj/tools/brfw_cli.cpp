#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "brfw/commands.hpp"
#include "brfw/config.hpp"
#include "brfw/errors.hpp"
#include "brfw/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Momentum-space spectral toolkit for the projected Coulomb-Dirac problem"};
  std::string command, config_path, Z;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(brfw::command_names()));
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides, "Override a configuration value, key=value (dot path)");
  app.add_option("--Z", Z, "Shorthand for --set params.Z=VALUE");
  app.add_flag("-q,--quiet", quiet, "Do not print the report to stdout");
  CLI11_PARSE(app, argc, argv);

  if (!Z.empty()) overrides.push_back("params.Z=" + Z);
  try {
    const brfw::RunConfig cfg = brfw::parse_config(config_path, overrides);
    const brfw::RunReport report = brfw::run_command(command, cfg);
    if (!quiet) std::cout << brfw::serialize_report(report);
    if (!cfg.output.directory.empty())
      for (const auto& format : cfg.output.formats)
        for (const auto& path : brfw::write_report(report, format, cfg.output.directory))
          std::cerr << "wrote " << path << "\n";
    for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
    for (const auto& e : report.errors) std::cerr << e << "\n";
    return report.exit_status();
  } catch (const brfw::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const brfw::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  }
}
