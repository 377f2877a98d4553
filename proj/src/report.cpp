#include "kplab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace kplab {

namespace {

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_number(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw std::runtime_error("bad number '" + s + "' in report");
  }
  return j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool DiagnosticsReport::all_pass() const {
  return !failed && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void DiagnosticsReport::merge(const DiagnosticsReport& o, const std::string& prefix) {
  for (auto t : o.tables) {
    t.name = prefix + t.name;
    tables.push_back(std::move(t));
  }
  for (const auto& [k, v] : o.scalars) scalars[prefix + k] = v;
  verdicts.insert(verdicts.end(), o.verdicts.begin(), o.verdicts.end());
  for (const auto& [k, v] : o.timings) timings[prefix + k] = v;
  if (o.failed) {
    failed = true;
    error += (error.empty() ? "" : "; ") + o.error;
  }
}

Verdict make_verdict(const std::string& id, const std::string& description, double measured,
                     const std::string& comparison, double threshold, const std::string& detail) {
  Verdict v{id, description, measured, threshold, comparison, false, detail};
  if (comparison == "<") v.pass = measured < threshold;
  else if (comparison == "<=") v.pass = measured <= threshold;
  else if (comparison == ">") v.pass = measured > threshold;
  else if (comparison == ">=") v.pass = measured >= threshold;
  else if (comparison == "==") v.pass = measured == threshold;
  else throw std::invalid_argument("unknown comparison '" + comparison + "'");
  return v;
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["run_id"] = r.run_id;
  j["command"] = r.command;
  j["config_hash"] = r.config_hash;
  j["failed"] = r.failed;
  j["error"] = r.error;
  j["all_pass"] = r.all_pass();
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (double v : row) jr.push_back(number(v));
      rows.push_back(jr);
    }
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  j["tables"] = tables;
  nlohmann::json scalars = nlohmann::json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = number(v);
  j["scalars"] = scalars;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"id", v.id},
                        {"description", v.description},
                        {"measured", number(v.measured)},
                        {"threshold", number(v.threshold)},
                        {"comparison", v.comparison},
                        {"pass", v.pass},
                        {"detail", v.detail}});
  j["verdicts"] = verdicts;
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [k, v] : r.timings) timings[k] = number(v);
  j["timings"] = timings;
  return j;
}

DiagnosticsReport report_from_json(const nlohmann::json& j) {
  DiagnosticsReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.failed = j.at("failed").get<bool>();
  r.error = j.at("error").get<std::string>();
  for (const auto& jt : j.value("tables", nlohmann::json::array())) {
    Table t;
    t.name = jt.at("name").get<std::string>();
    t.columns = jt.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : jt.at("rows")) {
      std::vector<double> row;
      for (const auto& v : jr) row.push_back(from_number(v));
      t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = from_number(v);
  for (const auto& jv : j.at("verdicts")) {
    Verdict v;
    v.id = jv.at("id").get<std::string>();
    v.description = jv.at("description").get<std::string>();
    v.measured = from_number(jv.at("measured"));
    v.threshold = from_number(jv.at("threshold"));
    v.comparison = jv.at("comparison").get<std::string>();
    v.pass = jv.at("pass").get<bool>();
    v.detail = jv.at("detail").get<std::string>();
    r.verdicts.push_back(std::move(v));
  }
  for (const auto& [k, v] : j.at("timings").items()) r.timings[k] = from_number(v);
  return r;
}

std::vector<std::filesystem::path> emit_report(const DiagnosticsReport& r, const std::filesystem::path& dir,
                                               const std::vector<std::string>& formats) {
  std::vector<std::filesystem::path> written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
  const bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  if (csv) {
    for (const auto& t : r.tables) {
      const auto path = dir / (t.name + ".csv");
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
      out << "# config_hash=" << r.config_hash << " table=" << t.name << '\n';
      for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
      }
      if (!out) throw std::runtime_error(path.string() + ": write failed");
      written.push_back(path);
    }
  }
  nlohmann::json m = to_json(r);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : written) files.push_back(p.filename().string());
  m["files"] = files;
  const bool json = std::find(formats.begin(), formats.end(), "json") != formats.end();
  if (!json) m.erase("tables");
  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << m.dump(2) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
  written.push_back(path);
  return written;
}

}  // namespace kplab
