#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace starspec {

using Json = nlohmann::ordered_json;

/// Experiment output. Rows are flat objects sharing the same keys.
struct ExperimentReport {
  std::string experiment;
  Json config_echo = Json::object();
  std::vector<Json> rows;
  double max_defect = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Extra summary fields, emitted after max_defect/threshold/pass.
  Json extra = Json::object();
  std::vector<std::string> flags;
  /// Kept out of the serialized form so that reports stay byte-stable.
  double wall_clock_seconds = 0.0;

  Json to_json() const;
};

/// Pretty JSON with every floating-point value printed at 17 significant
/// digits; NaN and infinities become null.
std::string format_json(const Json& j);
std::string format_number(double x);

/// Header from the first row's keys, one line per row.
std::string format_csv(const ExperimentReport& r);

/// Writes through a temporary file and a rename. Throws IoError.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace starspec
