#include <doctest.h>

#include "kplab/fd_oracle.hpp"
#include "kplab/kolmogorov.hpp"

using namespace kplab;

namespace {

RealArray gaussian(const Grid& g, double amp) {
  RealArray s(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(i, j) = amp * std::exp(-(g.x(i) * g.x(i) + g.y(j) * g.y(j)) / 2.0);
  return s;
}

// relative L2 error of the linear oracle against the exact spectral propagator
double oracle_error(int n, double T) {
  auto g = make_grid(n, n, 8.0, 8.0);
  RealArray v0 = gaussian(*g, 1.0);
  const double dt = 0.5 * fd_oracle_cfl(*g, v0, false);
  OracleTrajectory o = fd_oracle_solve(g, v0, T, dt, 0, false);
  Field exact = kolmogorov_closed_form(to_spectral(g, v0), T);
  RealArray ref = to_physical(exact);
  return l2_norm(*g, o.samples.back() - ref) / l2_norm(*g, ref);
}

}  // namespace

TEST_CASE("oracle keeps zero data at zero") {
  auto g = make_grid(16, 16, 4.0, 4.0);
  RealArray z = RealArray::Zero(16, 16);
  OracleTrajectory o = fd_oracle_solve(g, z, 0.1, 1e-3, 10);
  for (const auto& s : o.samples) CHECK(s.abs().maxCoeff() == 0.0);
  CHECK(o.times.back() == doctest::Approx(0.1));
}

TEST_CASE("oracle rejects steps above the CFL bound") {
  auto g = make_grid(32, 32, 4.0, 4.0);
  RealArray v0 = gaussian(*g, 1e-2);
  const double cfl = fd_oracle_cfl(*g, v0);
  CHECK(cfl == doctest::Approx(std::min(g->dx() / 4.0, g->dy() * g->dy() / (2 * std::pow(1 + 1e-2, 2)))).epsilon(1e-3));
  CHECK_THROWS_AS(fd_oracle_solve(g, v0, 0.1, 2 * cfl), std::invalid_argument);
  CHECK_NOTHROW(fd_oracle_solve(g, v0, 0.01, 0.9 * cfl));
}

TEST_CASE("linear oracle converges to the exact Kolmogorov evolution") {
  const double e1 = oracle_error(32, 0.1);
  const double e2 = oracle_error(64, 0.1);
  CHECK(e2 < e1);
  CHECK(e2 < 0.05);
  CHECK(e1 / e2 > 1.6);
}
