#include "kplab/fd_oracle.hpp"

#include <cmath>

namespace kplab {

double fd_oracle_cfl(const Grid& g, const RealArray& v0, bool nonlinear) {
  const double ymax = std::max(std::abs(g.y(0)), std::abs(g.y(g.ny - 1)));
  const double amax = nonlinear ? (1.0 + v0).square().maxCoeff() : 1.0;
  return std::min(g.dx() / ymax, g.dy() * g.dy() / (2.0 * amax));
}

RealArray fd_oracle_rhs(const Grid& g, const RealArray& v, bool nonlinear) {
  const int nx = g.nx, ny = g.ny;
  const double rdx = 1.0 / g.dx(), rdy2 = 1.0 / (g.dy() * g.dy());
  RealArray r(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double y = g.y(j);
    for (int i = 0; i < nx; ++i) {
      const double c = v(i, j);
      const double w = i > 0 ? v(i - 1, j) : 0.0;
      const double e = i < nx - 1 ? v(i + 1, j) : 0.0;
      const double s = j > 0 ? v(i, j - 1) : 0.0;
      const double n = j < ny - 1 ? v(i, j + 1) : 0.0;
      const double adv = y > 0.0 ? y * (c - w) * rdx : y * (e - c) * rdx;
      const double a = nonlinear ? (1.0 + c) * (1.0 + c) : 1.0;
      r(i, j) = -adv + a * (n - 2.0 * c + s) * rdy2;
    }
  }
  return r;
}

OracleTrajectory fd_oracle_solve(GridPtr grid, const RealArray& v0, double T, double dt, int save_every,
                                 bool nonlinear) {
  const Grid& g = *grid;
  if (v0.rows() != g.nx || v0.cols() != g.ny) throw std::invalid_argument("sample array shape does not match grid");
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
  const int n = std::max(1, int(std::ceil(T / dt - 1e-9)));
  const double h = T / n;
  if (h > fd_oracle_cfl(g, v0, nonlinear)) throw std::invalid_argument("oracle time step violates the CFL bound");

  OracleTrajectory out;
  out.dt = h;
  out.steps = n;
  out.times.push_back(0.0);
  out.samples.push_back(v0);
  RealArray v = v0;
  for (int s = 1; s <= n; ++s) {
    v += h * fd_oracle_rhs(g, v, nonlinear);
    if (s == n || (save_every > 0 && s % save_every == 0)) {
      out.times.push_back(T * double(s) / n);
      out.samples.push_back(v);
    }
  }
  return out;
}

}  // namespace kplab
