#pragma once

// The acceptance matrix: eleven criteria on the default rig (256^2 grid,
// lx = ly = 4 pi, T = 0.5, dt = 1e-3, eta = 3).

#include "kplab/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kplab {

struct AcceptanceOptions {
  int workers = 1;
  std::uint64_t seed = 1;
  std::ostream* log = nullptr;  // progress and one line per criterion
  std::vector<int> only;        // empty runs all criteria
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<Verdict> checks;
  double seconds = 0.0;
};

constexpr int kCriterionCount = 11;

std::string criterion_name(int id);

/// Runs the selected criteria. Each criterion's verdicts carry ids "C<n>.<check>".
DiagnosticsReport run_acceptance(const AcceptanceOptions& opt, std::vector<CriterionResult>* results = nullptr);

/// "PASS C4 picard-contraction  measured ... " style summary line.
std::string summary_line(const CriterionResult& r);

}  // namespace kplab
