#include "brfw/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "brfw/errors.hpp"

namespace brfw {

Json number(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  return x;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "\"NaN\"";
  if (std::isinf(x)) return x > 0 ? "\"Infinity\"" : "\"-Infinity\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void write(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j) scalar = scalar && !e.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], indent, depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], indent, depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string to_json_text(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Json tables_to_json(const std::vector<Table>& tables) {
  Json arr = Json::array();
  for (const auto& t : tables) {
    Json rows = Json::array();
    for (const auto& r : t.rows) rows.push_back(Json(r));
    arr.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  return arr;
}

Json hashed_part(const RunReport& r) {
  Json j;
  j["command"] = r.command;
  j["tool_version"] = r.tool_version;
  j["config"] = r.config;
  j["constants"] = r.constants;
  j["results"] = r.results;
  j["tables"] = tables_to_json(r.tables);
  j["violations"] = r.violations;
  j["errors"] = r.errors;
  return j;
}

}  // namespace

void seal(RunReport& report) {
  Json in;
  in["command"] = report.command;
  in["tool_version"] = report.tool_version;
  in["config"] = report.config;
  report.input_hash = hex64(fnv1a64(to_json_text(in, 0)));
  report.content_hash = hex64(fnv1a64(to_json_text(hashed_part(report), 0)));
}

Json report_to_json(const RunReport& r) {
  Json j;
  j["command"] = r.command;
  j["tool_version"] = r.tool_version;
  j["input_hash"] = r.input_hash;
  j["content_hash"] = r.content_hash;
  j["exit_status"] = r.exit_status();
  j["violations"] = r.violations;
  j["errors"] = r.errors;
  j["config"] = r.config;
  j["constants"] = r.constants;
  j["results"] = r.results;
  j["tables"] = tables_to_json(r.tables);
  j["timings"] = r.timings;
  return j;
}

RunReport report_from_json(const Json& j) {
  try {
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.input_hash = j.at("input_hash").get<std::string>();
    r.content_hash = j.at("content_hash").get<std::string>();
    r.violations = j.at("violations").get<std::vector<std::string>>();
    r.errors = j.at("errors").get<std::vector<std::string>>();
    r.config = j.at("config");
    r.constants = j.at("constants");
    r.results = j.at("results");
    r.timings = j.at("timings");
    for (const auto& t : j.at("tables")) {
      Table table;
      table.name = t.at("name").get<std::string>();
      table.columns = t.at("columns").get<std::vector<std::string>>();
      for (const auto& row : t.at("rows")) table.rows.push_back(row.get<std::vector<Json>>());
      r.tables.push_back(std::move(table));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string serialize_report(const RunReport& report) {
  return to_json_text(report_to_json(report)) + "\n";
}

RunReport parse_report(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("report is not valid JSON");
  return report_from_json(j);
}

namespace {

std::string csv_cell(const Json& cell) {
  std::string s;
  if (cell.is_string())
    s = cell.get<std::string>();
  else if (cell.is_number_float())
    s = format_double(cell.get<double>());
  else
    s = cell.dump();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out += (i ? "," : "") + csv_cell(Json(table.columns[i]));
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\r\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> write_report(const RunReport& report, const std::string& format,
                                      const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory + "': " + ec.message());
  std::vector<std::string> written;
  if (format == "json") {
    const fs::path path = fs::path(directory) / (report.command + ".json");
    write_file(path, serialize_report(report));
    written.push_back(path.string());
  } else if (format == "csv") {
    for (const auto& t : report.tables) {
      const fs::path path = fs::path(directory) / (report.command + "_" + t.name + ".csv");
      write_file(path, to_csv(t));
      written.push_back(path.string());
    }
  } else {
    throw IoError("unknown output format '" + format + "'");
  }
  return written;
}

}  // namespace brfw
