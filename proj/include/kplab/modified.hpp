#pragma once

// Weighted (mollified) linear system in physical coordinates,
//   d_t v = -W y d_x (W v) + W (1 + g)^2 d_y^2 (W v),   W = <delta y~>^-1,
// discretized with fourth-order centred differences and explicit RK2.

#include "kplab/spectral.hpp"

#include <functional>
#include <vector>

namespace kplab {

struct ModifiedConfig {
  int nx = 128;
  int ny = 128;
  double lx = 4.0 * M_PI;
  double ly = 4.0 * M_PI;
  double T = 0.5;
  double cfl_safety = 0.5;      // fraction of the oracle CFL bound
  double boundary_tol = 1e-10;  // sup |v| allowed on the outer two-cell ring
  int workers = 1;

  void validate() const;
  GridPtr make_grid() const;
};

/// Physical coefficient samples g(t); an empty function means g = 0.
using PhysicalCoefficientFn = std::function<RealArray(double)>;

/// -y D_x v + (1 + g)^2 D_yy v with fourth-order centred stencils, zero outside the box.
RealArray linearized_rhs_fd(const Grid& grid, const RealArray& v, const RealArray& g);

/// W [ -y D_x (W v) + (1 + g)^2 D_yy (W v) ]; delta = 0 is the unweighted operator.
RealArray modified_rhs(const Grid& grid, const RealArray& v, const RealArray& g, double delta);

struct DeltaRun {
  double delta = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::vector<double> times;        // every step
  std::vector<double> functional;   // ||v||^2_{H^4} + 1/4 int ||d_y (W v)||^2_{H^4}
  double bound_functional = 0.0;    // sup of the above
  RealArray initial;                // W v0
  RealArray final_state;
};

/// Throws std::invalid_argument for a CFL violation and std::runtime_error
/// when the solution reaches the boundary ring.
DeltaRun solve_modified(GridPtr grid, const RealArray& v0, double delta, const ModifiedConfig& cfg,
                        const PhysicalCoefficientFn& g = {});

struct DeltaSweep {
  std::vector<DeltaRun> runs;       // one per requested delta, same order
  DeltaRun limit;                   // delta = 0
  std::vector<double> distances;    // relative L2 distance to the limit at T
  double order = 0.0;               // log-log slope of distance against delta
  double bound_spread = 0.0;        // max / min bound functional
  double fitted_B0 = 0.0;           // max bound functional / ||v0||^2_{H^4}
};

/// deltas must hold at least three decreasing positive values.
DeltaSweep delta_sweep(GridPtr grid, const RealArray& v0, const std::vector<double>& deltas,
                       const ModifiedConfig& cfg, const PhysicalCoefficientFn& g = {});

}  // namespace kplab
