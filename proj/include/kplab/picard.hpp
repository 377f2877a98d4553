#pragma once

// Successive linearization: v^n solves the linearized equation with
// coefficient g = v^(n-1), starting from the time-constant extension of v0.

#include "kplab/kolmogorov.hpp"

#include <vector>

namespace kplab {

enum class PicardStatus { Converged, MaxIterations, NonContraction };

std::string picard_status_name(PicardStatus s);

struct ZetaMeasure {
  int n = 0;
  double sup = 0.0;          // max over nodes of ||zeta||^2_{H^4}
  double dissipation = 0.0;  // int ||d_y zeta||^2_{H^4}, trapezoid over nodes
  double measure = 0.0;      // sup + dissipation / 8
  double ratio = 0.0;        // measure(n) / measure(n-1); 0 for n = 0
};

struct PicardRun {
  SolveConfig config;
  int n_max = 12;
  double tol = 1e-20;
  std::vector<ZetaMeasure> zeta;
  PicardStatus status = PicardStatus::MaxIterations;
  int iterations = 0;  // number of linearized solves performed
  Trajectory limit;    // last iterate
  Trajectory previous; // the iterate before it

  bool converged() const { return status == PicardStatus::Converged; }
};

/// v^0(t) is v0's physical profile re-expressed at every node time.
Trajectory constant_extension(const Field& v0, const SolveConfig& cfg);

/// Measure of the difference of two trajectories on the same nodes.
ZetaMeasure zeta_measure(const Trajectory& a, const Trajectory& b);

/// Stops when the measure drops below tol (converged), after n_max solves,
/// or when three consecutive ratios are >= 1 (non-contraction).
PicardRun picard_solve(const Field& v0, const SolveConfig& cfg, int n_max = 12, double tol = 1e-20);

struct ContractionReport {
  std::vector<double> measures;
  double fitted_ratio = 0.0;  // exp of the least-squares slope of log(measure) in n
  bool converged = false;
  std::string verdict;
};

ContractionReport contraction_report(const std::vector<double>& measures, bool converged);
ContractionReport contraction_report(const PicardRun& run);

/// sup over common nodes of ||a - b||_{H^4}.
double sup_h4_difference(const Trajectory& a, const Trajectory& b);

}  // namespace kplab
