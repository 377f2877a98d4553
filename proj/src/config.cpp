#include "kplab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace kplab {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "; ") + e;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("expected an unsigned integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct Entry {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Entry real_entry(T ExperimentConfig::*block, double T::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*block).*field = parse_real(v); },
          [=](const ExperimentConfig& c) { return fmt((c.*block).*field); }};
}

template <class T>
Entry int_entry(T ExperimentConfig::*block, int T::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*block).*field = parse_int(v); },
          [=](const ExperimentConfig& c) { return std::to_string((c.*block).*field); }};
}

const std::map<std::string, Entry>& table() {
  static const std::map<std::string, Entry> t = [] {
    using C = ExperimentConfig;
    std::map<std::string, Entry> m;
    m["grid.nx"] = int_entry(&C::solve, &SolveConfig::nx);
    m["grid.ny"] = int_entry(&C::solve, &SolveConfig::ny);
    m["grid.lx"] = real_entry(&C::solve, &SolveConfig::lx);
    m["grid.ly"] = real_entry(&C::solve, &SolveConfig::ly);
    m["solve.T"] = real_entry(&C::solve, &SolveConfig::T);
    m["solve.dt"] = real_entry(&C::solve, &SolveConfig::dt);
    m["solve.scheme"] = {[](C& c, const std::string& v) { c.solve.scheme = parse_scheme(v); },
                         [](const C& c) { return scheme_name(c.solve.scheme); }};
    m["solve.eps"] = {[](C& c, const std::string& v) { c.solve.eps = c.profile.eps = parse_real(v); },
                      [](const C& c) { return fmt(c.solve.eps); }};
    m["solve.profile"] = {[](C& c, const std::string& v) { c.profile.kind = parse_profile(v); },
                          [](const C& c) { return profile_name(c.profile.kind); }};
    m["solve.sigma_x"] = real_entry(&C::profile, &ProfileSpec::sigma_x);
    m["solve.sigma_y"] = real_entry(&C::profile, &ProfileSpec::sigma_y);
    m["solve.seed"] = {[](C& c, const std::string& v) { c.profile.seed = parse_u64(v); },
                       [](const C& c) { return std::to_string(c.profile.seed); }};
    m["solve.dealias"] = {[](C& c, const std::string& v) { c.solve.dealias = parse_bool(v); },
                          [](const C& c) { return std::string(c.solve.dealias ? "true" : "false"); }};
    m["solve.tail_guard"] = real_entry(&C::solve, &SolveConfig::tail_guard);
    m["solve.guard_band"] = real_entry(&C::solve, &SolveConfig::guard_band);
    m["solve.save_every"] = int_entry(&C::solve, &SolveConfig::save_every);
    m["solve.max_halvings"] = int_entry(&C::solve, &SolveConfig::max_halvings);
    m["picard.n_max"] = {[](C& c, const std::string& v) { c.picard_n_max = parse_int(v); },
                         [](const C& c) { return std::to_string(c.picard_n_max); }};
    m["picard.tol"] = {[](C& c, const std::string& v) { c.picard_tol = parse_real(v); },
                       [](const C& c) { return fmt(c.picard_tol); }};
    m["modified.deltas"] = {[](C& c, const std::string& v) {
                              c.deltas.clear();
                              for (const auto& d : split_list(v)) c.deltas.push_back(parse_real(d));
                            },
                            [](const C& c) {
                              std::string s;
                              for (double d : c.deltas) s += (s.empty() ? "" : ", ") + fmt(d);
                              return s;
                            }};
    m["modified.nx"] = int_entry(&C::modified, &ModifiedConfig::nx);
    m["modified.ny"] = int_entry(&C::modified, &ModifiedConfig::ny);
    m["modified.lx"] = real_entry(&C::modified, &ModifiedConfig::lx);
    m["modified.ly"] = real_entry(&C::modified, &ModifiedConfig::ly);
    m["modified.T"] = real_entry(&C::modified, &ModifiedConfig::T);
    m["modified.cfl_safety"] = real_entry(&C::modified, &ModifiedConfig::cfl_safety);
    m["diagnostics.eta"] = real_entry(&C::diagnostics, &DiagnosticsConfig::eta);
    m["diagnostics.k_max"] = int_entry(&C::diagnostics, &DiagnosticsConfig::k_max);
    m["diagnostics.l_max"] = int_entry(&C::diagnostics, &DiagnosticsConfig::l_max);
    m["diagnostics.n_max"] = int_entry(&C::diagnostics, &DiagnosticsConfig::n_max);
    m["diagnostics.band"] = real_entry(&C::diagnostics, &DiagnosticsConfig::band);
    m["diagnostics.commutator_dt"] = real_entry(&C::diagnostics, &DiagnosticsConfig::commutator_dt);
    m["diagnostics.commutator_t"] = real_entry(&C::diagnostics, &DiagnosticsConfig::commutator_t);
    m["diagnostics.t_min"] = real_entry(&C::diagnostics, &DiagnosticsConfig::t_min);
    m["oracle.nx"] = int_entry(&C::oracle, &OracleSettings::nx);
    m["oracle.ny"] = int_entry(&C::oracle, &OracleSettings::ny);
    m["oracle.lx"] = real_entry(&C::oracle, &OracleSettings::lx);
    m["oracle.ly"] = real_entry(&C::oracle, &OracleSettings::ly);
    m["oracle.sigma_x"] = real_entry(&C::oracle, &OracleSettings::sigma_x);
    m["oracle.sigma_y"] = real_entry(&C::oracle, &OracleSettings::sigma_y);
    m["oracle.T"] = real_entry(&C::oracle, &OracleSettings::T);
    m["oracle.cfl_fraction"] = real_entry(&C::oracle, &OracleSettings::cfl_fraction);
    m["output.directory"] = {[](C& c, const std::string& v) { c.output_directory = v; },
                             [](const C& c) { return c.output_directory; }};
    m["output.formats"] = {[](C& c, const std::string& v) { c.formats = split_list(v); },
                           [](const C& c) {
                             std::string s;
                             for (const auto& f : c.formats) s += (s.empty() ? "" : ", ") + f;
                             return s;
                           }};
    return m;
  }();
  return t;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& kv : table()) k.push_back(kv.first);
    return k;
  }();
  return keys;
}

double parse_real(const std::string& raw) {
  std::string s = trim(raw);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = M_PI;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty() || s == "+") return scale;
    if (s == "-") return -scale;
  }
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected a real number, got '" + raw + "'");
  return v * scale;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = table().find(key);
    if (it == table().end()) {
      std::string best;
      std::size_t bd = std::string::npos;
      for (const auto& k : config_keys()) {
        const std::size_t d = edit_distance(key, k);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      std::string msg = key + ": unknown key";
      if (bd <= std::max<std::size_t>(3, key.size() / 3)) msg += " (did you mean '" + best + "'?)";
      errors.push_back(msg);
      continue;
    }
    try {
      it->second.set(cfg, value);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.errors().begin(), e.errors().end());
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> e;
  auto need = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) e.push_back(key + ": " + what);
  };
  const SolveConfig& s = c.solve;
  need(s.nx >= kMinModes && s.nx % 2 == 0, "grid.nx", "must be even and >= 8");
  need(s.ny >= kMinModes && s.ny % 2 == 0, "grid.ny", "must be even and >= 8");
  need(s.lx > 0.0, "grid.lx", "must be positive");
  need(s.ly > 0.0, "grid.ly", "must be positive");
  need(s.T > 0.0, "solve.T", "must be positive");
  need(s.dt > 0.0, "solve.dt", "must be positive");
  need(!(s.dt > 0.0 && s.T > 0.0) || s.dt <= s.T, "solve.dt", "must not exceed solve.T");
  need(s.eps >= 0.0, "solve.eps", "must be non-negative");
  need(c.profile.sigma_x > 0.0, "solve.sigma_x", "must be positive");
  need(c.profile.sigma_y > 0.0, "solve.sigma_y", "must be positive");
  need(s.tail_guard > 0.0 && s.tail_guard < 1.0, "solve.tail_guard", "must lie in (0, 1)");
  need(s.guard_band > 0.0 && s.guard_band < 1.0, "solve.guard_band", "must lie in (0, 1)");
  need(s.save_every >= 1, "solve.save_every", "must be >= 1");
  need(s.max_halvings >= 0, "solve.max_halvings", "must be >= 0");
  need(c.picard_n_max >= 2, "picard.n_max", "must be >= 2");
  need(c.picard_tol > 0.0, "picard.tol", "must be positive");
  bool dec = c.deltas.size() >= 3;
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    if (!(c.deltas[i] > 0.0 && c.deltas[i] < 1.0)) dec = false;
    if (i > 0 && !(c.deltas[i] < c.deltas[i - 1])) dec = false;
  }
  need(dec, "modified.deltas", "needs at least three decreasing values in (0, 1)");
  const ModifiedConfig& m = c.modified;
  need(m.nx >= kMinModes && m.nx % 2 == 0, "modified.nx", "must be even and >= 8");
  need(m.ny >= kMinModes && m.ny % 2 == 0, "modified.ny", "must be even and >= 8");
  need(m.lx > 0.0, "modified.lx", "must be positive");
  need(m.ly > 0.0, "modified.ly", "must be positive");
  need(m.T > 0.0, "modified.T", "must be positive");
  need(m.cfl_safety > 0.0 && m.cfl_safety <= 1.0, "modified.cfl_safety", "must lie in (0, 1]");
  const DiagnosticsConfig& d = c.diagnostics;
  need(d.eta > 2.0, "diagnostics.eta", "must exceed 2");
  need(d.k_max >= 2 && d.k_max <= kMaxDerivativeOrder, "diagnostics.k_max", "must lie in [2, 8]");
  need(d.l_max >= 0 && d.n_max >= 0 && d.l_max + d.n_max <= kMaxDerivativeOrder, "diagnostics.l_max",
       "l_max + n_max must lie in [0, 8]");
  need(d.band > 0.0 && d.band < 1.0, "diagnostics.band", "must lie in (0, 1)");
  need(d.commutator_dt > 0.0, "diagnostics.commutator_dt", "must be positive");
  need(d.commutator_t > d.commutator_dt, "diagnostics.commutator_t", "must exceed diagnostics.commutator_dt");
  need(d.t_min >= 0.0, "diagnostics.t_min", "must be non-negative");
  const OracleSettings& o = c.oracle;
  need(o.nx >= kMinModes && o.nx % 4 == 0 && o.nx <= 128, "oracle.nx", "must be a multiple of 4 in [8, 128]");
  need(o.ny >= kMinModes && o.ny % 4 == 0 && o.ny <= 128, "oracle.ny", "must be a multiple of 4 in [8, 128]");
  need(o.lx > 0.0, "oracle.lx", "must be positive");
  need(o.ly > 0.0, "oracle.ly", "must be positive");
  need(o.sigma_x > 0.0, "oracle.sigma_x", "must be positive");
  need(o.sigma_y > 0.0, "oracle.sigma_y", "must be positive");
  need(o.T > 0.0, "oracle.T", "must be positive");
  need(o.cfl_fraction > 0.0 && o.cfl_fraction <= 1.0, "oracle.cfl_fraction", "must lie in (0, 1]");
  need(!c.output_directory.empty(), "output.directory", "must not be empty");
  for (const auto& f : c.formats) need(f == "json" || f == "csv", "output.formats", "unknown format '" + f + "'");
  if (!e.empty()) throw ConfigError(e);
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, entry] : table()) {
    if (key == "output.directory") continue;
    out += key + " = " + entry.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_text(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

}  // namespace kplab
