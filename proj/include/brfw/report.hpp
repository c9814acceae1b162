#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace brfw {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "brfw 1.0.0";

/// Flat table for CSV export; cells are JSON numbers or strings.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  bool operator==(const Table&) const = default;
};

struct RunReport {
  std::string command;
  std::string tool_version = kToolVersion;
  Json config;
  Json constants;
  Json results;
  std::vector<Table> tables;
  Json timings;  // wall seconds; not hashed
  std::vector<std::string> violations;
  std::vector<std::string> errors;
  std::string input_hash;
  std::string content_hash;

  int exit_status() const { return errors.empty() ? (violations.empty() ? 0 : 1) : 2; }
  bool operator==(const RunReport&) const = default;
};

/// JSON number for a double; non-finite values become the strings "NaN", "Infinity", "-Infinity".
Json number(double x);
/// "%.17g" rendering, with ".0" appended when the text would read as an integer.
std::string format_double(double x);

/// Pretty JSON with stable key order and 17-significant-digit floats.
std::string to_json_text(const Json& j, int indent = 2);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);

/// Fill input_hash (command, version, config) and content_hash (everything except timings).
void seal(RunReport& report);

Json report_to_json(const RunReport& report);
RunReport report_from_json(const Json& j);
std::string serialize_report(const RunReport& report);
/// Throws IoError on malformed input.
RunReport parse_report(const std::string& text);

/// RFC 4180: comma separated, quoted when needed, CRLF line endings.
std::string to_csv(const Table& table);

/// Writes <dir>/<command>.json and/or <dir>/<command>_<table>.csv; returns written paths.
std::vector<std::string> write_report(const RunReport& report, const std::string& format,
                                      const std::string& directory);

}  // namespace brfw
