#include <doctest.h>

#include "kplab/modified.hpp"

#include <cstring>

using namespace kplab;

namespace {

constexpr double kSigma = 1.0;

RealArray gaussian(const Grid& g, double amp) {
  RealArray s(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s(i, j) = amp * std::exp(-(g.x(i) * g.x(i) + g.y(j) * g.y(j)) / (2 * kSigma * kSigma));
  return s;
}

// Hand-differentiated W [ -y d_x (W G) + d_y^2 (W G) ] for W = (1 + d^2 r^2)^(-1/2).
double weighted_operator(double x, double y, double d) {
  const double q = 1 + d * d * (x * x + y * y);
  const double W = std::pow(q, -0.5);
  const double Wx = -d * d * x * std::pow(q, -1.5);
  const double Wy = -d * d * y * std::pow(q, -1.5);
  const double Wyy = -d * d * std::pow(q, -1.5) + 3 * std::pow(d, 4) * y * y * std::pow(q, -2.5);
  const double s2 = kSigma * kSigma;
  const double G = std::exp(-(x * x + y * y) / (2 * s2));
  const double Gx = -x / s2 * G;
  const double Gy = -y / s2 * G;
  const double Gyy = (y * y / (s2 * s2) - 1 / s2) * G;
  const double ux = Wx * G + W * Gx;
  const double uyy = Wyy * G + 2 * Wy * Gy + W * Gyy;
  return W * (-y * ux + uyy);
}

double operator_error(int n) {
  auto g = make_grid(n, n, 8.0, 8.0);
  RealArray rhs = modified_rhs(*g, gaussian(*g, 1.0), RealArray::Zero(n, n), 0.1);
  double err = 0.0;
  for (int j = n / 4; j < 3 * n / 4; ++j)
    for (int i = n / 4; i < 3 * n / 4; ++i)
      err = std::max(err, std::abs(rhs(i, j) - weighted_operator(g->x(i), g->y(j), 0.1)));
  return err;
}

ModifiedConfig small_config() {
  ModifiedConfig c;
  c.nx = c.ny = 48;
  c.lx = c.ly = 8.0;
  c.T = 0.05;
  return c;
}

}  // namespace

TEST_CASE("delta = 0 is the unweighted operator bit for bit") {
  auto g = make_grid(32, 32, 6.0, 6.0);
  RealArray v = gaussian(*g, 0.3);
  RealArray c = gaussian(*g, 0.01);
  RealArray a = modified_rhs(*g, v, c, 0.0);
  RealArray b = linearized_rhs_fd(*g, v, c);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
  CHECK(modified_rhs(*g, RealArray::Zero(32, 32), c, 0.2).abs().maxCoeff() == 0.0);
}

TEST_CASE("weighted operator matches the hand-differentiated form at fourth order") {
  const double e1 = operator_error(64);
  const double e2 = operator_error(128);
  CHECK(e2 < 1e-4);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("zero data and the boundary guard") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  DeltaRun z = solve_modified(g, RealArray::Zero(48, 48), 0.1, cfg);
  CHECK(z.final_state.abs().maxCoeff() == 0.0);
  CHECK(z.bound_functional == 0.0);

  RealArray wide = RealArray::Constant(48, 48, 1e-3);
  CHECK_THROWS_AS(solve_modified(g, wide, 0.1, cfg), std::runtime_error);
}

TEST_CASE("all-zero sweep has zero distances") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  DeltaSweep sw = delta_sweep(g, RealArray::Zero(48, 48), {0.1, 0.03, 0.01}, cfg);
  REQUIRE(sw.distances.size() == 3);
  for (double d : sw.distances) CHECK(d == 0.0);
  CHECK_THROWS(delta_sweep(g, RealArray::Zero(48, 48), {0.1, 0.03}, cfg));
}

TEST_CASE("distance to the delta = 0 run shrinks with delta") {
  auto cfg = small_config();
  auto g = cfg.make_grid();
  DeltaSweep sw = delta_sweep(g, gaussian(*g, 1e-3), {0.1, 0.03, 0.01}, cfg);
  CHECK(sw.distances[0] > sw.distances[1]);
  CHECK(sw.distances[1] > sw.distances[2]);
  CHECK(sw.order >= 0.8);
  CHECK(sw.bound_spread < 1.1);
}
