#pragma once

// Smoothing diagnostics: powers of the time-weighted vector field
//   H_eta = t^(eta+1)/(eta+1) d_x + t^eta d_y,
// the commutator [d_t + y d_x, H^k], factorial bound fits, the weighted
// mixed-derivative table and Fourier-decay radii.

#include "kplab/kolmogorov.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace kplab {

struct VectorFieldSpec {
  double eta = 3.0;
  int k = 1;
  void validate() const;  // eta > 1, 0 <= k <= kMaxDerivativeOrder
};

/// H_eta^k f at time f.t. Zero field when t = 0 and k >= 1.
Field apply_H_power(const Field& f, const VectorFieldSpec& spec);

/// Coefficients (c_x, c_y) of H_eta at time t.
std::pair<double, double> H_coefficients(double eta, double t);

/// Smooth space-time function with a closed-form time derivative.
struct TestFunction {
  std::string name;
  std::function<double(double, double, double)> value;  // (t, x, y)
  std::function<double(double, double, double)> dt;
};

/// e^{-t} sin x cos y exp(-(x^2 + y^2)/(2 sigma^2)).
TestFunction commutator_test_function(double sigma = 1.5);

/// Relative L2 discrepancy between
///   (d_t + y d_x) H^k f - H^k (d_t + y d_x) f     (central differences in t)
/// and  k eta t^(eta-1) d_y H^(k-1) f  at time t.
double commutator_residual(GridPtr grid, const VectorFieldSpec& spec, const TestFunction& f, double t, double dt);

struct BoundEntry {
  int i = 0;             // k, or l
  int j = 0;             // 0, or n
  double value = 0.0;    // M_k or W(l, n)
  double estimate = 0.0; // A(k) or L(l, n)
};

struct BoundFit {
  std::vector<BoundEntry> entries;
  double fitted_constant = 0.0;
  double spread = 0.0;  // max / median of the estimates
  bool admissible = true;
};

/// Bounds max/median < 2 count as admissible. All-zero estimates are
/// admissible with constant 0.
void finish_fit(BoundFit& fit);

/// log(n!) via lgamma.
double log_factorial(int n);

/// M_k = max over stored times of ||H^k v||^2 + 1/4 int_0^t ||d_y H^k v||^2,
/// A(k) = (sqrt(M_k) (k+1)^2 / k!)^(1/(k-1)) for k in [2, k_max].
BoundFit fit_A(const Trajectory& traj, double eta, int k_max);

struct DerivativeTable {
  double eta = 3.0;
  int l_max = 0;
  int n_max = 0;
  Eigen::ArrayXXd direct;       // (l_max+1) x (n_max+1)
  Eigen::ArrayXXd combination;  // same table through H_eta, H_{eta/2}
  double max_relative_gap = 0.0;
};

/// W(l, n) = max over stored t in (0, T] of t^((eta+1) l + eta n) ||d_x^l d_y^n v||_{H^4}.
DerivativeTable mixed_derivative_table(const Trajectory& traj, double eta, int l_max, int n_max);

/// Coefficients c[a][b] with t^((eta+1) l + eta n) d_x^l d_y^n
///   = sum_{a+b = l+n} c[a][b] H_eta^a (s H_{eta/2})^b,  s = t^(eta/2).
std::vector<std::vector<double>> combination_coefficients(double eta, int l, int n);

/// L(l, n) = (W / (l! n!))^(1/(l+n+1)) over l + n >= 1; L = max.
BoundFit fit_L(const Eigen::ArrayXXd& table);

struct Radii {
  double rho_x = 0.0;
  double rho_y = 0.0;
};

constexpr double kRadiusInfinity = std::numeric_limits<double>::infinity();

/// Fourier-decay radii along the physical kx and (ky - t kx) axes.
Radii analyticity_radius(const Field& f);

/// Slope of log rho against log t over nodes with t >= t_min and finite rho > 0.
double growth_exponent(const std::vector<double>& t, const std::vector<double>& rho, double t_min);

struct EnergyCertificate {
  std::vector<double> times;
  std::vector<double> functional;
  double sup = 0.0;
  double eps = 0.0;
  double implied_B = 0.0;  // sup / eps^2
};

/// eps defaults to ||v(0)||_{H^4} when negative.
EnergyCertificate energy_certificate(const Trajectory& traj, double eps = -1.0);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kplab
