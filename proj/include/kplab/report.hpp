#pragma once

// Consolidated run report and its JSON / CSV emission.

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kplab {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

struct Verdict {
  std::string id;           // check id, e.g. "C4.ratio"
  std::string description;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparison;   // "<", "<=", ">", ">=", "in", "=="
  bool pass = false;
  std::string detail;

  bool operator==(const Verdict&) const = default;
};

struct DiagnosticsReport {
  std::string run_id;
  std::string command;
  std::string config_hash;
  std::vector<Table> tables;
  std::map<std::string, double> scalars;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> timings;  // seconds, manifest only
  bool failed = false;
  std::string error;

  bool all_pass() const;
  void merge(const DiagnosticsReport& other, const std::string& prefix = "");
  bool operator==(const DiagnosticsReport&) const = default;
};

/// Builds a verdict comparing measured against threshold.
Verdict make_verdict(const std::string& id, const std::string& description, double measured,
                     const std::string& comparison, double threshold, const std::string& detail = "");

nlohmann::json to_json(const DiagnosticsReport& r);
DiagnosticsReport report_from_json(const nlohmann::json& j);

/// Writes manifest.json always, and one CSV per table when formats holds
/// "csv". Returns the files written. Throws std::runtime_error naming the path
/// on I/O failure.
std::vector<std::filesystem::path> emit_report(const DiagnosticsReport& r, const std::filesystem::path& dir,
                                               const std::vector<std::string>& formats);

/// %.17g rendering with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v);

}  // namespace kplab
