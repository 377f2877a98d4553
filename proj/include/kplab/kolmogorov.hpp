#pragma once

// Time steppers for  d_t v + y d_x v - (1 + g)^2 d_y^2 v = 0  in the sheared
// frame, where the equation reads  d_t w = (1 + g)^2 (d_y - t d_x')^2 w.

#include "kplab/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kplab {

enum class Scheme { ExactKolmogorov, ImexLinearized, ImexNonlinear };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);  // throws std::invalid_argument
int scheme_id(Scheme s);

struct SolveConfig {
  int nx = 256;
  int ny = 256;
  double lx = 4.0 * M_PI;
  double ly = 4.0 * M_PI;
  double T = 0.5;
  double dt = 1e-3;
  Scheme scheme = Scheme::ImexNonlinear;
  double eps = 1e-3;
  bool dealias = true;
  double tail_guard = 1e-8;
  double guard_band = 0.25;
  int save_every = 10;      // store every n-th nominal step
  int max_halvings = 20;
  double growth_limit = 0.10;

  void validate() const;    // throws std::invalid_argument
  GridPtr make_grid() const;
  int steps() const;        // nominal step count, dt adjusted to land on T
};

/// Integral of (ky - s kx)^2 over [a, b], evaluated in midpoint form.
double kolmogorov_phi(double kx, double ky, double a, double b);

/// Coefficient g(t) as a sheared spectral field.
using CoefficientFn = std::function<Field(double)>;

struct Trajectory {
  SolveConfig config;
  std::vector<double> times;
  std::vector<Field> fields;
  std::vector<double> h4;           // ||v||_{H^4} at stored times
  std::vector<double> tail;         // tail mass at stored times
  std::vector<double> dissipation;  // int_0^t ||d_y v||^2_{H^4}, all substeps
  int accepted_steps = 0;
  int rejected_steps = 0;

  std::size_t size() const { return times.size(); }
  /// ||v(t)||^2_{H^4} + (1/4) int_0^t ||d_y v||^2_{H^4} at node i.
  double energy(std::size_t i) const { return h4[i] * h4[i] + 0.25 * dissipation[i]; }
  /// Linear interpolation of the sheared coefficients between nodes.
  Field at(double t) const;
};

class StepRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Field exact_kolmogorov_step(const Field& f, double dt);

/// One integrating-factor midpoint step. g is sampled at t, t + dt/2, t + dt.
/// Throws StepRejected when the H^4 growth or tail guard is exceeded.
Field linearized_step(const Field& f, const CoefficientFn& g, double dt, const SolveConfig& cfg);
Field nonlinear_step(const Field& f, double dt, const SolveConfig& cfg);

Trajectory solve_exact(const Field& v0, const SolveConfig& cfg);
Trajectory solve_linearized(const Field& v0, const CoefficientFn& g, const SolveConfig& cfg);
Trajectory solve_linearized(const Field& v0, const Trajectory& g, const SolveConfig& cfg);
Trajectory solve_nonlinear(const Field& v0, const SolveConfig& cfg);
/// Dispatches on cfg.scheme; the linearized scheme uses g = 0.
Trajectory solve(const Field& v0, const SolveConfig& cfg);

/// The g = 0 closed form  w0(k) exp(-Phi(k, 0, t)).
Field kolmogorov_closed_form(const Field& v0, double t);

}  // namespace kplab
