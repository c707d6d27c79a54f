#include "starspec/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "starspec/errors.hpp"

namespace starspec {

Json ExperimentReport::to_json() const {
  Json j = Json::object();
  j["experiment"] = experiment;
  j["config_echo"] = config_echo;
  j["rows"] = Json::array();
  for (const auto& r : rows) j["rows"].push_back(r);
  Json summary = Json::object();
  summary["max_defect"] = max_defect;
  summary["threshold"] = threshold;
  summary["pass"] = pass;
  for (const auto& [k, v] : extra.items()) summary[k] = v;
  summary["flags"] = flags;
  j["summary"] = summary;
  j["version"] = STARSPEC_VERSION;
  return j;
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void emit(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        emit(v, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string csv_cell(const Json& v) {
  if (v.is_number_float()) {
    const double x = v.get<double>();
    return std::isfinite(x) ? format_number(x) : "";
  }
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

}  // namespace

std::string format_json(const Json& j) {
  std::string out;
  emit(j, 0, out);
  return out + "\n";
}

std::string format_csv(const ExperimentReport& r) {
  if (r.rows.empty()) return "";
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.rows.front().items()) keys.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out += ",";
      if (row.contains(keys[i])) out += csv_cell(row[keys[i]]);
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

}  // namespace starspec
