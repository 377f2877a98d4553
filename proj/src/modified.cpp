#include "kplab/modified.hpp"

#include "kplab/diagnostics.hpp"

#include <thread>

namespace kplab {

void ModifiedConfig::validate() const {
  if (nx < kMinModes || ny < kMinModes || nx % 2 || ny % 2) throw std::invalid_argument("grid sizes must be even and >= 8");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("box lengths must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

GridPtr ModifiedConfig::make_grid() const { return kplab::make_grid(nx, ny, lx, ly); }

RealArray linearized_rhs_fd(const Grid& grid, const RealArray& v, const RealArray& g) {
  const int nx = grid.nx, ny = grid.ny;
  const double cx = 1.0 / (12.0 * grid.dx()), cy = 1.0 / (12.0 * grid.dy() * grid.dy());
  auto at = [&](int i, int j) { return (i < 0 || i >= nx || j < 0 || j >= ny) ? 0.0 : v(i, j); };
  RealArray r(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double y = grid.y(j);
    for (int i = 0; i < nx; ++i) {
      const double dx = (-at(i + 2, j) + 8.0 * at(i + 1, j) - 8.0 * at(i - 1, j) + at(i - 2, j)) * cx;
      const double dyy =
          (-at(i, j + 2) + 16.0 * at(i, j + 1) - 30.0 * v(i, j) + 16.0 * at(i, j - 1) - at(i, j - 2)) * cy;
      const double a = (1.0 + g(i, j)) * (1.0 + g(i, j));
      r(i, j) = -(y * dx) + a * dyy;
    }
  }
  return r;
}

RealArray modified_rhs(const Grid& grid, const RealArray& v, const RealArray& g, double delta) {
  const RealArray u = weight_multiply(grid, v, delta, -1);
  return weight_multiply(grid, linearized_rhs_fd(grid, u, g), delta, -1);
}

namespace {

double ring_sup(const RealArray& v) {
  double s = 0.0;
  s = std::max(s, v.topRows(2).abs().maxCoeff());
  s = std::max(s, v.bottomRows(2).abs().maxCoeff());
  s = std::max(s, v.leftCols(2).abs().maxCoeff());
  s = std::max(s, v.rightCols(2).abs().maxCoeff());
  return s;
}

}  // namespace

DeltaRun solve_modified(GridPtr grid, const RealArray& v0, double delta, const ModifiedConfig& cfg,
                        const PhysicalCoefficientFn& g) {
  cfg.validate();
  const Grid& G = *grid;
  if (v0.rows() != G.nx || v0.cols() != G.ny) throw std::invalid_argument("sample array shape does not match grid");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");

  const RealArray zero = RealArray::Zero(G.nx, G.ny);
  auto coeff = [&](double t) { return g ? g(t) : zero; };

  DeltaRun run;
  run.delta = delta;
  run.initial = weight_multiply(G, v0, delta, -1);
  RealArray v = run.initial;

  const double ymax = std::max(std::abs(G.y(0)), std::abs(G.y(G.ny - 1)));
  const double amax = (1.0 + coeff(0.0)).square().maxCoeff();
  const double cfl = std::min(G.dx() / ymax, G.dy() * G.dy() / (2.0 * amax));
  const int n = std::max(1, int(std::ceil(cfg.T / (cfg.cfl_safety * cfl) - 1e-9)));
  run.dt = cfg.T / n;
  run.steps = n;
  if (run.dt > cfl) throw std::invalid_argument("modified-system time step violates the CFL bound");

  auto dissipation = [&](const RealArray& s) {
    return dissipation_density(to_spectral(grid, weight_multiply(G, s, delta, -1), 0.0));
  };
  double integral = 0.0;
  double prev = dissipation(v);
  auto record = [&](double t, const RealArray& s) {
    const double f = sobolev_norm_squared(to_spectral(grid, s, 0.0)) + 0.25 * integral;
    run.times.push_back(t);
    run.functional.push_back(f);
    run.bound_functional = std::max(run.bound_functional, f);
  };
  record(0.0, v);
  for (int s = 0; s < n; ++s) {
    const double t = cfg.T * double(s) / n;
    const double h = run.dt;
    const RealArray k1 = modified_rhs(G, v, coeff(t), delta);
    const RealArray vm = v + 0.5 * h * k1;
    v += h * modified_rhs(G, vm, coeff(t + 0.5 * h), delta);
    if (ring_sup(v) > cfg.boundary_tol) throw std::runtime_error("solution reached the boundary ring");
    const double d = dissipation(v);
    integral += 0.5 * h * (prev + d);
    prev = d;
    record(cfg.T * double(s + 1) / n, v);
  }
  run.final_state = v;
  return run;
}

DeltaSweep delta_sweep(GridPtr grid, const RealArray& v0, const std::vector<double>& deltas,
                       const ModifiedConfig& cfg, const PhysicalCoefficientFn& g) {
  if (deltas.size() < 3) throw std::invalid_argument("delta sweep needs at least three values");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw std::invalid_argument("deltas must be decreasing");
  }
  DeltaSweep sw;
  std::vector<double> all = deltas;
  all.push_back(0.0);
  std::vector<DeltaRun> runs(all.size());
  std::vector<std::exception_ptr> errors(all.size());
  auto work = [&](std::size_t i) {
    try {
      runs[i] = solve_modified(grid, v0, all[i], cfg, g);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::size_t(cfg.workers));
  for (std::size_t start = 0; start < all.size(); start += workers) {
    std::vector<std::thread> pool;
    for (std::size_t i = start; i < std::min(all.size(), start + workers); ++i) {
      if (workers == 1) work(i);
      else pool.emplace_back(work, i);
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  sw.limit = std::move(runs.back());
  runs.pop_back();
  sw.runs = std::move(runs);
  const double ref = l2_norm(*grid, sw.limit.final_state);
  double bmin = std::numeric_limits<double>::infinity(), bmax = 0.0;
  bool all_zero = true;
  for (const auto& r : sw.runs) {
    const double d = l2_norm(*grid, r.final_state - sw.limit.final_state);
    sw.distances.push_back(ref > 0.0 ? d / ref : d);
    if (d > 0.0) all_zero = false;
    bmin = std::min(bmin, r.bound_functional);
    bmax = std::max(bmax, r.bound_functional);
  }
  sw.bound_spread = bmin > 0.0 ? bmax / bmin : (bmax == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  if (!all_zero) {
    std::vector<double> ds, dist;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      if (sw.distances[i] > 0.0) {
        ds.push_back(deltas[i]);
        dist.push_back(sw.distances[i]);
      }
    }
    if (ds.size() >= 2) sw.order = loglog_slope(ds, dist);
  }
  const double n0 = sobolev_norm_squared(to_spectral(grid, v0, 0.0));
  sw.fitted_B0 = n0 > 0.0 ? bmax / n0 : 0.0;
  return sw;
}

}  // namespace kplab
