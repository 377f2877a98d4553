#pragma once

// Experiment configuration: flat "section.key = value" text, '#' comments.
// Reals accept a trailing "pi" multiplier ("4pi", "0.5*pi"); lists are
// comma separated; booleans are true/false, on/off or yes/no.

#include "kplab/kolmogorov.hpp"
#include "kplab/modified.hpp"
#include "kplab/profiles.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace kplab {

struct DiagnosticsConfig {
  double eta = 3.0;
  int k_max = 6;
  int l_max = 4;
  int n_max = 4;
  double band = 0.25;
  double commutator_dt = 1e-4;
  double commutator_t = 0.5;
  double t_min = 0.05;  // earliest time used for radius fits
};

/// Finite-difference cross-check instance (Gaussian elongated in x).
struct OracleSettings {
  int nx = 128;
  int ny = 128;
  double lx = 120.0;
  double ly = 8.0;
  double sigma_x = 16.0;
  double sigma_y = 1.0;
  double T = 0.2;
  double cfl_fraction = 0.25;
};

struct ExperimentConfig {
  SolveConfig solve;
  ProfileSpec profile;
  int picard_n_max = 12;
  double picard_tol = 1e-20;
  std::vector<double> deltas{0.1, 0.03, 0.01};
  ModifiedConfig modified;
  DiagnosticsConfig diagnostics;
  OracleSettings oracle;
  std::string output_directory = "kplab-out";
  std::vector<std::string> formats{"json", "csv"};
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Every accepted key, in canonical order.
const std::vector<std::string>& config_keys();

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Throws ConfigError listing every precondition violation.
void validate(const ExperimentConfig& cfg);

/// Canonical "key = value" rendering of every field.
std::string canonical_text(const ExperimentConfig& cfg);
/// FNV-1a 64 of canonical_text, 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Parses "4pi", "0.5*pi", "pi", "-1e-3".
double parse_real(const std::string& s);

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace kplab
