#include "kplab/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace kplab {

void VectorFieldSpec::validate() const {
  if (!(eta > 1.0)) throw std::invalid_argument("eta must exceed 1");
  if (k < 0) throw std::invalid_argument("vector-field power must be non-negative");
  if (k > kMaxDerivativeOrder) throw std::out_of_range("vector-field power exceeds resolution-safety cap");
}

std::pair<double, double> H_coefficients(double eta, double t) {
  return {std::pow(t, eta + 1.0) / (eta + 1.0), std::pow(t, eta)};
}

Field apply_H_power(const Field& f, const VectorFieldSpec& spec) {
  spec.validate();
  if (spec.k == 0) return f;
  if (f.t == 0.0) return Field::zeros(f.grid, f.t);
  const Grid& g = f.g();
  const auto [cx, cy] = H_coefficients(spec.eta, f.t);
  const std::complex<double> I(0.0, 1.0);
  Field out(f.grid, f.t);
  for (int j = 0; j < g.ny; ++j) {
    if (j == g.ny / 2) continue;
    for (int i = 0; i < g.nx; ++i) {
      if (i == g.nx / 2) continue;
      const std::complex<double> m = I * (cx * g.kx[i] + cy * (g.ky[j] - f.t * g.kx[i]));
      out.coeffs(i, j) = std::pow(m, spec.k) * f.coeffs(i, j);
    }
  }
  return out;
}

TestFunction commutator_test_function(double sigma) {
  const double s2 = 2.0 * sigma * sigma;
  TestFunction f;
  f.name = "exp(-t) sin(x) cos(y) gaussian";
  f.value = [s2](double t, double x, double y) {
    return std::exp(-t) * std::sin(x) * std::cos(y) * std::exp(-(x * x + y * y) / s2);
  };
  f.dt = [s2](double t, double x, double y) {
    return -std::exp(-t) * std::sin(x) * std::cos(y) * std::exp(-(x * x + y * y) / s2);
  };
  return f;
}

double commutator_residual(GridPtr grid, const VectorFieldSpec& spec, const TestFunction& f, double t, double dt) {
  spec.validate();
  if (!(t > dt && dt > 0.0)) throw std::invalid_argument("need t > dt > 0");
  const Grid& g = *grid;
  if (spec.k == 0) return 0.0;

  auto sample = [&](const std::function<double(double, double, double)>& fn, double tau) {
    RealArray s(g.nx, g.ny);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s(i, j) = fn(tau, g.x(i), g.y(j));
    return s;
  };
  auto H = [&](const RealArray& s, double tau, int k) {
    return to_physical(apply_H_power(to_spectral(grid, s, tau), {spec.eta, k}));
  };
  const RealArray Y = g.y_coords();
  auto transport = [&](const RealArray& s, double tau) {
    return RealArray(Y * to_physical(derivative(to_spectral(grid, s, tau), 1, 0)));
  };

  const RealArray f0 = sample(f.value, t);
  const RealArray dtH = (H(sample(f.value, t + dt), t + dt, spec.k) - H(sample(f.value, t - dt), t - dt, spec.k)) /
                        (2.0 * dt);
  const RealArray lhs = dtH + transport(H(f0, t, spec.k), t) - H(sample(f.dt, t) + transport(f0, t), t, spec.k);

  const Field hk1 = apply_H_power(to_spectral(grid, f0, t), {spec.eta, spec.k - 1});
  const RealArray rhs = spec.k * spec.eta * std::pow(t, spec.eta - 1.0) * to_physical(derivative(hk1, 0, 1));

  const double denom = l2_norm(g, rhs);
  const double num = l2_norm(g, lhs - rhs);
  return denom > 0.0 ? num / denom : num;
}

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

void finish_fit(BoundFit& fit) {
  std::vector<double> est;
  for (const auto& e : fit.entries) est.push_back(e.estimate);
  if (est.empty()) {
    fit.fitted_constant = 0.0;
    fit.spread = 0.0;
    fit.admissible = true;
    return;
  }
  const double mx = *std::max_element(est.begin(), est.end());
  fit.fitted_constant = mx;
  if (mx == 0.0) {
    fit.spread = 0.0;
    fit.admissible = true;
    return;
  }
  std::vector<double> sorted = est;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  fit.spread = median > 0.0 ? mx / median : std::numeric_limits<double>::infinity();
  fit.admissible = std::isfinite(fit.spread) && fit.spread < 2.0;
}

BoundFit fit_A(const Trajectory& traj, double eta, int k_max) {
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  BoundFit fit;
  for (int k = 2; k <= k_max; ++k) {
    const VectorFieldSpec spec{eta, k};
    double integral = 0.0, prev = 0.0, best = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const Field hk = apply_H_power(traj.fields[i], spec);
      const double d = dissipation_density(hk);
      if (i > 0) integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (prev + d);
      prev = d;
      best = std::max(best, sobolev_norm_squared(hk) + 0.25 * integral);
    }
    double a = 0.0;
    if (best > 0.0) {
      const double log_inner = 0.5 * std::log(best) + 2.0 * std::log(k + 1.0) - log_factorial(k);
      a = std::exp(log_inner / (k - 1));
    }
    fit.entries.push_back({k, 0, best, a});
  }
  finish_fit(fit);
  return fit;
}

namespace {

template <class Real>
std::vector<std::vector<Real>> coefficients(Real eta, int l, int n) {
  const Real alpha = -(eta + 2) * (eta + 1) / eta;
  const Real beta = (2 * eta + 2) / eta;
  const Real gamma = (eta + 2) / eta;
  // poly[b] multiplies P^(deg - b) Q^b.
  std::vector<Real> poly{Real(1)};
  auto times = [&](Real p, Real q) {
    std::vector<Real> next(poly.size() + 1, Real(0));
    for (std::size_t b = 0; b < poly.size(); ++b) {
      next[b] += p * poly[b];
      next[b + 1] += q * poly[b];
    }
    poly = std::move(next);
  };
  for (int i = 0; i < l; ++i) times(alpha, -alpha);
  for (int i = 0; i < n; ++i) times(beta, -gamma);
  const int deg = l + n;
  std::vector<std::vector<Real>> c(deg + 1, std::vector<Real>(deg + 1, Real(0)));
  for (int b = 0; b <= deg; ++b) c[deg - b][b] = poly[b];
  return c;
}

}  // namespace

std::vector<std::vector<double>> combination_coefficients(double eta, int l, int n) {
  const auto c = coefficients<long double>(eta, l, n);
  std::vector<std::vector<double>> out(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) out[a].assign(c[a].begin(), c[a].end());
  return out;
}

namespace {

// ||sum c[a][b] H_eta^a (s H_{eta/2})^b f||_{H^4}, evaluated per mode in
// extended precision.
double combination_norm(const Field& f, double eta, int l, int n) {
  const Grid& g = f.g();
  const int deg = l + n;
  const auto c = coefficients<long double>(eta, l, n);
  using C = std::complex<long double>;
  const long double t = f.t;
  const long double e = eta;
  const long double c1x = std::pow(t, e + 1) / (e + 1), c1y = std::pow(t, e);
  const long double c2x = std::pow(t, e / 2 + 1) / (e / 2 + 1), c2y = std::pow(t, e / 2);
  const long double s = std::pow(t, e / 2);
  long double sum = 0.0L;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (deg > 0 && (i == g.nx / 2 || j == g.ny / 2)) continue;
      const long double kx = g.kx[i];
      const long double ky = (long double)g.ky[j] - t * kx;
      const C P(0.0L, c1x * kx + c1y * ky);
      const C Q(0.0L, s * (c2x * kx + c2y * ky));
      C m(0.0L, 0.0L);
      for (int b = 0; b <= deg; ++b) {
        C term(c[deg - b][b], 0.0L);
        for (int p = 0; p < deg - b; ++p) term *= P;
        for (int p = 0; p < b; ++p) term *= Q;
        m += term;
      }
      const long double w = std::pow(1.0L + kx * kx + ky * ky, 4);
      const C v = m * C(f.coeffs(i, j).real(), f.coeffs(i, j).imag());
      sum += w * std::norm(v);
    }
  }
  return std::sqrt(double(sum * (long double)g.area()));
}

}  // namespace

DerivativeTable mixed_derivative_table(const Trajectory& traj, double eta, int l_max, int n_max) {
  if (!(eta > 2.0)) throw std::invalid_argument("the weighted table needs eta > 2");
  if (l_max < 0 || n_max < 0) throw std::invalid_argument("table caps must be non-negative");
  if (l_max + n_max > kMaxDerivativeOrder) throw std::out_of_range("table order exceeds resolution-safety cap");
  DerivativeTable tab;
  tab.eta = eta;
  tab.l_max = l_max;
  tab.n_max = n_max;
  tab.direct = Eigen::ArrayXXd::Zero(l_max + 1, n_max + 1);
  tab.combination = Eigen::ArrayXXd::Zero(l_max + 1, n_max + 1);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Field& f = traj.fields[i];
    if (!(f.t > 0.0)) continue;
    for (int l = 0; l <= l_max; ++l) {
      for (int n = 0; n <= n_max; ++n) {
        const double w = std::pow(f.t, (eta + 1.0) * l + eta * n);
        tab.direct(l, n) = std::max(tab.direct(l, n), w * sobolev_norm(derivative(f, l, n)));
        tab.combination(l, n) = std::max(tab.combination(l, n), combination_norm(f, eta, l, n));
      }
    }
  }
  double gap = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    for (int n = 0; n <= n_max; ++n) {
      const double a = tab.direct(l, n), b = tab.combination(l, n);
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale > 0.0) gap = std::max(gap, std::abs(a - b) / scale);
    }
  }
  tab.max_relative_gap = gap;
  return tab;
}

BoundFit fit_L(const Eigen::ArrayXXd& table) {
  if (table.size() == 0) throw std::invalid_argument("empty derivative table");
  BoundFit fit;
  for (int l = 0; l < table.rows(); ++l) {
    for (int n = 0; n < table.cols(); ++n) {
      if (l + n == 0) continue;
      const double w = table(l, n);
      double est = 0.0;
      if (w > 0.0) est = std::exp((std::log(w) - log_factorial(l) - log_factorial(n)) / (l + n + 1));
      fit.entries.push_back({l, n, w, est});
    }
  }
  finish_fit(fit);
  return fit;
}

namespace {

double axis_radius(const std::vector<double>& k, const std::vector<double>& env) {
  double emax = 0.0;
  for (double e : env) emax = std::max(emax, e);
  std::vector<double> ks, ys;
  for (std::size_t b = 0; b < env.size(); ++b) {
    if (k[b] > 0.0 && env[b] > 1e-8 * emax) {
      ks.push_back(k[b]);
      ys.push_back(std::log(env[b]));
    }
  }
  const int m = int(ks.size());
  if (m < 2) return 0.0;
  const int cols = m >= 4 ? 3 : 2;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    A(r, 0) = 1.0;
    A(r, 1) = -ks[r];
    if (cols == 3) A(r, 2) = -std::log1p(ks[r] * ks[r]);
    rhs[r] = ys[r];
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
  return std::max(0.0, sol[1]);
}

}  // namespace

Radii analyticity_radius(const Field& f) {
  const Grid& g = f.g();
  const RealArray amp = f.coeffs.abs();
  if (amp.maxCoeff() < 1e-14) return {kRadiusInfinity, kRadiusInfinity};
  const double dkx = M_PI / g.lx, dky = M_PI / g.ly;
  const int bx = int(std::floor(2.0 / 3.0 * g.kx_max() / dkx)) + 1;
  const int by = int(std::floor(2.0 / 3.0 * g.ky_max() / dky)) + 1;
  std::vector<double> ex(bx, 0.0), ey(by, 0.0), kx(bx), ky(by);
  for (int b = 0; b < bx; ++b) kx[b] = b * dkx;
  for (int b = 0; b < by; ++b) ky[b] = b * dky;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double a = amp(i, j);
      const long ix = std::lround(std::abs(g.kx[i]) / dkx);
      const long iy = std::lround(std::abs(g.ky[j] - f.t * g.kx[i]) / dky);
      if (ix < bx) ex[ix] = std::max(ex[ix], a);
      if (iy < by) ey[iy] = std::max(ey[iy], a);
    }
  }
  return {axis_radius(kx, ex), axis_radius(ky, ey)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double growth_exponent(const std::vector<double>& t, const std::vector<double>& rho, double t_min) {
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_min && std::isfinite(rho[i]) && rho[i] > 0.0) {
      ts.push_back(t[i]);
      rs.push_back(rho[i]);
    }
  }
  if (ts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return loglog_slope(ts, rs);
}

EnergyCertificate energy_certificate(const Trajectory& traj, double eps) {
  EnergyCertificate c;
  c.eps = eps >= 0.0 ? eps : (traj.h4.empty() ? 0.0 : traj.h4.front());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    c.times.push_back(traj.times[i]);
    c.functional.push_back(traj.energy(i));
    c.sup = std::max(c.sup, traj.energy(i));
  }
  c.implied_B = c.eps > 0.0 ? c.sup / (c.eps * c.eps) : 0.0;
  return c;
}

}  // namespace kplab
