#pragma once

// Physical-coordinate finite-difference reference solver on the truncated
// box: first-order upwind in x, second-order centred in y, explicit Euler,
// zero values outside the box.

#include "kplab/spectral.hpp"

#include <vector>

namespace kplab {

struct OracleTrajectory {
  std::vector<double> times;
  std::vector<RealArray> samples;
  double dt = 0.0;
  int steps = 0;
};

/// Largest stable Euler step, min(dx / max|y|, dy^2 / (2 max (1 + v)^2)).
double fd_oracle_cfl(const Grid& g, const RealArray& v0, bool nonlinear = true);

/// One Euler increment rate  -y D_x^upwind v + (1 + v)^2 D_yy v  (or with
/// coefficient 1 when nonlinear is false).
RealArray fd_oracle_rhs(const Grid& g, const RealArray& v, bool nonlinear = true);

/// Integrates to T with the largest step <= dt that divides T. Stores every
/// save_every-th step plus the final state; save_every = 0 stores only the
/// endpoints. Throws std::invalid_argument when dt exceeds the CFL bound.
OracleTrajectory fd_oracle_solve(GridPtr grid, const RealArray& v0, double T, double dt, int save_every = 0,
                                 bool nonlinear = true);

}  // namespace kplab
