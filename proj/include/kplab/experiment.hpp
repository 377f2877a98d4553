#pragma once

// Pipelines behind the CLI subcommands. Each returns a report fragment;
// run_experiment adds timings, writes outputs and survives failures.

#include "kplab/config.hpp"
#include "kplab/report.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace kplab {

struct RunOptions {
  std::filesystem::path out;
  bool quiet = false;
  int workers = 1;
  bool write_checkpoints = true;
  std::ostream* log = nullptr;
};

/// Worker count from KPLAB_WORKERS (default 1).
int workers_from_env();

DiagnosticsReport run_solve(const ExperimentConfig& cfg, const RunOptions& opt);
DiagnosticsReport run_diagnose(const ExperimentConfig& cfg, const RunOptions& opt);
DiagnosticsReport run_picard(const ExperimentConfig& cfg, const RunOptions& opt);
DiagnosticsReport run_modified(const ExperimentConfig& cfg, const RunOptions& opt);
DiagnosticsReport run_commutator_check(const ExperimentConfig& cfg, const RunOptions& opt);
DiagnosticsReport run_oracle_compare(const ExperimentConfig& cfg, const RunOptions& opt);

/// Dispatches on command ("solve", "picard", "modified", "diagnose",
/// "commutator-check", "oracle-compare", "suite"), then emits the report into
/// opt.out. Module errors mark the report failed instead of propagating.
DiagnosticsReport run_experiment(const ExperimentConfig& cfg, const std::string& command, const RunOptions& opt);

}  // namespace kplab
