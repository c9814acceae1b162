#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "brfw/commands.hpp"
#include "brfw/config.hpp"
#include "brfw/errors.hpp"
#include "brfw/report.hpp"

using namespace brfw;

namespace {

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("brfw_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

RunConfig quick_spectrum() {
  return parse_config("", {"grid.n=60", "solver.k=2", "binding.Z_values=[1,2,5]", "binding.n=60"});
}

}  // namespace

TEST_CASE("empty configuration gives the defaults") {
  const RunConfig c = parse_config("", {});
  CHECK(c.params.c == 137.035999084);
  CHECK(c.params.m == 1.0);
  CHECK(c.params.Z == 1.0);
  CHECK(c.kappa == -1);
  CHECK(c.grid.n == 200);
  CHECK(c.solver.route == "both");
  CHECK(c.solver.k == 4);
  CHECK(c.output.formats == std::vector<std::string>{"json"});
}

TEST_CASE("flags override file values") {
  const auto dir = scratch_dir("cfg");
  std::filesystem::create_directories(dir);
  const auto path = (dir / "run.json").string();
  std::ofstream(path) << R"({"params": {"Z": 1}, "grid": {"n": 64}})";
  const RunConfig from_file = parse_config(path, {});
  CHECK(from_file.grid.n == 64);
  CHECK(from_file.params.Z == 1.0);
  const RunConfig overridden = parse_config(path, {"params.Z=2"});
  CHECK(overridden.params.Z == 2.0);
  CHECK(overridden.grid.n == 64);
  CHECK(overridden.tree["params"]["Z"].get<double>() == 2.0);
}

TEST_CASE("configuration errors name the offending key") {
  CHECK(key_of([] { parse_config("", {"grid.n=4"}); }) == "grid.n");
  CHECK(key_of([] { parse_config("", {"solver.k=0"}); }) == "solver.k");
  CHECK(key_of([] { parse_config("", {"grid.nodes=4"}); }) == "grid.nodes");
  CHECK(key_of([] { parse_config("", {"grid.n=\"many\""}); }) == "grid.n");
  CHECK(key_of([] { parse_config("", {"grid.n=2.5"}); }) == "grid.n");
  CHECK(key_of([] { parse_config("", {"solver.route=fast"}); }) == "solver.route");
  CHECK(key_of([] { parse_config("", {"grid.scheme=spline"}); }) == "grid.scheme");
  CHECK(key_of([] { parse_config("", {"channel.kappa=0"}); }) == "channel.kappa");
  CHECK(key_of([] { parse_config("", {"output.formats=[\"xml\"]"}); }) == "output.formats");
  CHECK(key_of([] { parse_config("/nonexistent/cfg.json", {}); }) == "--config");
  CHECK(key_of([] { parse_config("", {"noequals"}); }) == "noequals");
}

TEST_CASE("floats are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2.0");
  CHECK(format_double(-2.0 / 3.0) == "-0.66666666666666663");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(number(std::nan("")) == "NaN");
  CHECK(number(-HUGE_VAL) == "-Infinity");
  Json j;
  j["b"] = 1.0 / 3.0;
  j["a"] = 1;
  CHECK(to_json_text(j) == "{\n  \"b\": 0.33333333333333331,\n  \"a\": 1\n}");
}

TEST_CASE("CSV follows RFC 4180") {
  Table t{"demo", {"name", "value"}, {{"plain", 1.5}, {"with,comma", 2}, {"say \"hi\"", -0.25}}};
  CHECK(to_csv(t) ==
        "name,value\r\nplain,1.5\r\n\"with,comma\",2\r\n\"say \"\"hi\"\"\",-0.25\r\n");
}

TEST_CASE("report round-trips losslessly") {
  RunReport r = run_command("spectrum", quick_spectrum());
  r.results["odd"] = {number(std::nan("")), number(HUGE_VAL), 1e-320, -0.0, 0.1};
  seal(r);
  const std::string text = serialize_report(r);
  const RunReport back = parse_report(text);
  CHECK(back == r);
  CHECK(serialize_report(back) == text);
  CHECK_THROWS_AS(parse_report("{ not json"), IoError);
  CHECK_THROWS_AS(parse_report("{}"), IoError);
}

TEST_CASE("content hash is deterministic and sensitive to the configuration") {
  const RunReport a = run_command("spectrum", quick_spectrum());
  const RunReport b = run_command("spectrum", quick_spectrum());
  CHECK(a.content_hash == b.content_hash);
  CHECK(a.input_hash == b.input_hash);
  CHECK(a.content_hash.size() == 16);
  const RunReport c = run_command("spectrum", parse_config("", {"grid.n=61", "solver.k=2"}));
  CHECK(c.input_hash != a.input_hash);
  CHECK(c.content_hash != a.content_hash);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("binding curve CSV has |Z| * k rows") {
  const RunReport r = run_command("spectrum", quick_spectrum());
  CHECK(r.exit_status() == 0);
  const auto it = std::find_if(r.tables.begin(), r.tables.end(),
                               [](const Table& t) { return t.name == "binding_curve"; });
  REQUIRE(it != r.tables.end());
  CHECK(it->rows.size() == 3 * 2);
  const auto dir = scratch_dir("csv");
  const auto written = write_report(r, "csv", dir.string());
  const auto path = dir / "spectrum_binding_curve.csv";
  REQUIRE(std::filesystem::exists(path));
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string csv = ss.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
  CHECK(write_report(r, "json", dir.string()).size() == 1);
  CHECK_THROWS_AS(write_report(r, "xml", dir.string()), IoError);
  CHECK_THROWS_AS(write_report(r, "json", "/proc/brfw_no_such_dir"), IoError);
}

TEST_CASE("invariant violations and module errors give nonzero exit status") {
  const RunReport flat = run_command(
      "critical-scan", parse_config("", {"critical.Z_values=[130]", "critical.n_values=[100]"}));
  CHECK(flat.exit_status() == 1);
  CHECK(flat.violations.size() == 1);
  const RunReport broken = run_command("scaling-limit", parse_config("", {"scaling.eta_values=[]"}));
  CHECK(broken.exit_status() == 2);
  CHECK_FALSE(broken.errors.empty());
  CHECK_THROWS_AS(run_command("unknown", parse_config("", {})), ConfigError);
  CHECK(command_names().size() == 7);
}

TEST_CASE("content hash does not depend on the worker count") {
  const RunConfig cfg = parse_config("", {"grid.scheme=\"galerkin\"", "grid.n=80", "solver.k=2"});
  setenv("BRFW_THREADS", "1", 1);
  const RunReport one = run_command("spectrum", cfg);
  setenv("BRFW_THREADS", "3", 1);
  const RunReport three = run_command("spectrum", cfg);
  unsetenv("BRFW_THREADS");
  CHECK(one.content_hash == three.content_hash);
  CHECK(one.timings["threads"] == 1);
  CHECK(three.timings["threads"] == 3);
}
