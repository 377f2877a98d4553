#include <doctest.h>

#include "kplab/diagnostics.hpp"
#include "kplab/profiles.hpp"

#include <random>

using namespace kplab;

namespace {

Field gaussian_at(GridPtr g, double t) {
  RealArray s(g->nx, g->ny);
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) s(i, j) = std::exp(-(g->x(i) * g->x(i) + 2 * g->y(j) * g->y(j)));
  return to_spectral(g, s, t);
}

double rel_diff(const Field& a, const Field& b) {
  return (a.coeffs - b.coeffs).abs().maxCoeff() / std::max(a.coeffs.abs().maxCoeff(), 1e-300);
}

SolveConfig small_config() {
  SolveConfig c;
  c.nx = c.ny = 64;
  c.lx = c.ly = M_PI;
  c.T = 0.2;
  c.dt = 2e-3;
  c.save_every = 10;
  c.scheme = Scheme::ExactKolmogorov;
  return c;
}

Field small_profile(GridPtr g, double eps) {
  ProfileSpec p;
  p.eps = eps;
  p.sigma_x = p.sigma_y = 0.4;
  return make_profile(g, p);
}

}  // namespace

TEST_CASE("powers of the vector field") {
  auto g = make_grid(32, 32, 6.0, 6.0);
  const double t = 0.7, eta = 3.0;
  Field f = gaussian_at(g, t);

  CHECK(rel_diff(apply_H_power(f, {eta, 0}), f) == 0.0);

  const double cx = std::pow(t, eta + 1) / (eta + 1), cy = std::pow(t, eta);
  auto [hx, hy] = H_coefficients(eta, t);
  CHECK(hx == doctest::Approx(cx));
  CHECK(hy == doctest::Approx(cy));

  Field expect = (cx * cx) * derivative(f, 2, 0) + (2 * cx * cy) * derivative(f, 1, 1) + (cy * cy) * derivative(f, 0, 2);
  Field h2 = apply_H_power(f, {eta, 2});
  CHECK(rel_diff(h2, expect) < 1e-12);

  Field twice = apply_H_power(apply_H_power(f, {eta, 1}), {eta, 1});
  CHECK(rel_diff(twice, h2) < 1e-12);

  Field at0 = gaussian_at(g, 0.0);
  CHECK(apply_H_power(at0, {eta, 2}).coeffs.abs().maxCoeff() == 0.0);
  CHECK_THROWS(VectorFieldSpec{3.0, 9}.validate());
}

TEST_CASE("commutator residual") {
  auto g = make_grid(128, 128, 4 * M_PI, 4 * M_PI);
  TestFunction f = commutator_test_function();
  CHECK(commutator_residual(g, {3.0, 0}, f, 0.5, 1e-3) == 0.0);
  for (int k : {1, 2}) {
    const double r1 = commutator_residual(g, {3.0, k}, f, 0.5, 2e-3);
    const double r2 = commutator_residual(g, {3.0, k}, f, 0.5, 1e-3);
    CHECK(r2 < 1e-5);
    CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK_THROWS(commutator_residual(g, {3.0, 1}, f, 1e-3, 1e-2));
}

TEST_CASE("combination coefficients reproduce the weighted derivative symbol") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double eta : {2.5, 3.0, 4.0}) {
    for (int l = 0; l <= 3; ++l)
      for (int n = 0; n <= 3; ++n) {
        const auto c = combination_coefficients(eta, l, n);
        const double t = 0.8, kx = u(rng), xi = u(rng);
        const std::complex<double> I(0.0, 1.0);
        const std::complex<double> P = I * (std::pow(t, eta + 1) / (eta + 1) * kx + std::pow(t, eta) * xi);
        const double s = std::pow(t, eta / 2);
        const std::complex<double> Q = I * s * (std::pow(t, eta / 2 + 1) / (eta / 2 + 1) * kx + s * xi);
        std::complex<double> sum = 0.0;
        for (int a = 0; a <= l + n; ++a) sum += c[a][l + n - a] * std::pow(P, a) * std::pow(Q, l + n - a);
        const std::complex<double> target =
            std::pow(t, (eta + 1) * l + eta * n) * std::pow(I * kx, l) * std::pow(I * xi, n);
        CHECK(std::abs(sum - target) <= 1e-9 * std::max(1.0, std::abs(target)));
      }
  }
}

TEST_CASE("mixed derivative table") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  Trajectory tr = solve(small_profile(g, 1e-3), cfg);
  DerivativeTable tab = mixed_derivative_table(tr, 3.0, 2, 2);
  double sup0 = 0.0, sup11 = 0.0;
  for (const auto& f : tr.fields) {
    if (f.t <= 0.0) continue;
    sup0 = std::max(sup0, sobolev_norm(f));
    sup11 = std::max(sup11, std::pow(f.t, 7.0) * sobolev_norm(derivative(f, 1, 1)));
  }
  CHECK(tab.direct(0, 0) == doctest::Approx(sup0).epsilon(1e-14));
  CHECK(tab.direct(1, 1) == doctest::Approx(sup11).epsilon(1e-14));
  CHECK(tab.max_relative_gap < 1e-10);
  CHECK_THROWS_AS(mixed_derivative_table(tr, 2.0, 2, 2), std::invalid_argument);

  Trajectory zero = solve(Field::zeros(g, 0.0), cfg);
  DerivativeTable zt = mixed_derivative_table(zero, 3.0, 2, 2);
  CHECK(zt.direct.abs().maxCoeff() == 0.0);
  CHECK(fit_L(zt.direct).fitted_constant == 0.0);
  CHECK(fit_A(zero, 3.0, 6).fitted_constant == 0.0);
  CHECK(fit_A(zero, 3.0, 6).admissible);
}

TEST_CASE("fit_L inverts a synthetic table") {
  Eigen::ArrayXXd w(5, 5);
  for (int l = 0; l < 5; ++l)
    for (int n = 0; n < 5; ++n) w(l, n) = std::pow(2.0, l + n + 1) * std::tgamma(l + 1.0) * std::tgamma(n + 1.0);
  BoundFit fit = fit_L(w);
  CHECK(fit.fitted_constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.admissible);
  CHECK(fit.spread == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analyticity radii") {
  auto g = make_grid(64, 64, M_PI, M_PI);
  Field e(g, 0.0), a(g, 0.0);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      const double k = std::hypot(g->kx[i], g->ky[j]);
      e.coeffs(i, j) = std::exp(-2.0 * k);
      a.coeffs(i, j) = std::pow(1.0 + k * k, -3.0);
    }
  Radii r = analyticity_radius(e);
  CHECK(r.rho_x == doctest::Approx(2.0).epsilon(0.05));
  CHECK(r.rho_y == doctest::Approx(2.0).epsilon(0.05));
  Radii ra = analyticity_radius(a);
  CHECK(ra.rho_x < 0.05);
  CHECK(ra.rho_y < 0.05);
  Radii rz = analyticity_radius(Field::zeros(g, 0.0));
  CHECK(rz.rho_x == kRadiusInfinity);
  CHECK(rz.rho_y == kRadiusInfinity);
}

TEST_CASE("growth exponent and log-log slopes") {
  std::vector<double> t{0.05, 0.1, 0.2, 0.4}, rho;
  for (double s : t) rho.push_back(3.0 * std::sqrt(s));
  CHECK(growth_exponent(t, rho, 0.05) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(loglog_slope({1, 2, 4}, {1, 4, 16}) == doctest::Approx(2.0));
  CHECK(std::isnan(growth_exponent({0.01}, {1.0}, 0.05)));
}

TEST_CASE("energy certificate") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  Trajectory zero = solve(Field::zeros(g, 0.0), cfg);
  EnergyCertificate z = energy_certificate(zero);
  CHECK(z.sup == 0.0);
  CHECK(z.implied_B == 0.0);

  Trajectory tr = solve(small_profile(g, 1e-3), cfg);
  EnergyCertificate c = energy_certificate(tr);
  CHECK(c.eps == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(c.implied_B == doctest::Approx(1.0).epsilon(1e-12));  // non-increasing functional, sup at t = 0
}

TEST_CASE("log factorial and fit bookkeeping") {
  CHECK(log_factorial(5) == doctest::Approx(std::log(120.0)));
  BoundFit fit;
  fit.entries = {{1, 0, 0, 1.0}, {2, 0, 0, 1.5}, {3, 0, 0, 4.0}};
  finish_fit(fit);
  CHECK(fit.fitted_constant == 4.0);
  CHECK(fit.spread == doctest::Approx(4.0 / 1.5));
  CHECK_FALSE(fit.admissible);
}

TEST_CASE("fitted constants are stable under time-grid refinement") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  Field v0 = small_profile(g, 1e-3);
  cfg.save_every = 10;
  Trajectory coarse = solve(v0, cfg);
  cfg.save_every = 5;
  Trajectory fine = solve(v0, cfg);
  const double a1 = fit_A(coarse, 3.0, 4).fitted_constant, a2 = fit_A(fine, 3.0, 4).fitted_constant;
  const double l1 = fit_L(mixed_derivative_table(coarse, 3.0, 2, 2).direct).fitted_constant;
  const double l2 = fit_L(mixed_derivative_table(fine, 3.0, 2, 2).direct).fitted_constant;
  CHECK(std::abs(a2 / a1 - 1) < 0.02);
  CHECK(std::abs(l2 / l1 - 1) < 0.02);
}
