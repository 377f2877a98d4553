#include "kplab/picard.hpp"

#include <cmath>

namespace kplab {

std::string picard_status_name(PicardStatus s) {
  switch (s) {
    case PicardStatus::Converged: return "converged";
    case PicardStatus::MaxIterations: return "max-iterations";
    case PicardStatus::NonContraction: return "non-contraction";
  }
  return "unknown";
}

Trajectory constant_extension(const Field& v0, const SolveConfig& cfg) {
  cfg.validate();
  const RealArray phys = to_physical(v0);
  Trajectory tr;
  tr.config = cfg;
  const int n = cfg.steps();
  for (int s = 0; s <= n; ++s) {
    if (s != 0 && s % cfg.save_every != 0 && s != n) continue;
    const double t = cfg.T * double(s) / n;
    Field f = s == 0 ? v0 : to_spectral(v0.grid, phys, t);
    tr.times.push_back(t);
    tr.h4.push_back(sobolev_norm(f));
    tr.tail.push_back(tail_mass(f, cfg.guard_band));
    tr.dissipation.push_back(0.0);
    tr.fields.push_back(std::move(f));
  }
  return tr;
}

ZetaMeasure zeta_measure(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw std::invalid_argument("trajectories have different node sets");
  ZetaMeasure z;
  double prev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Field d = a.fields[i] - b.fields[i];
    z.sup = std::max(z.sup, sobolev_norm_squared(d));
    const double dd = dissipation_density(d);
    if (i > 0) z.dissipation += 0.5 * (a.times[i] - a.times[i - 1]) * (prev + dd);
    prev = dd;
  }
  z.measure = z.sup + z.dissipation / 8.0;
  return z;
}

PicardRun picard_solve(const Field& v0, const SolveConfig& cfg, int n_max, double tol) {
  if (n_max < 2) throw std::invalid_argument("n_max must be at least 2");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  PicardRun run;
  run.config = cfg;
  run.n_max = n_max;
  run.tol = tol;
  run.limit = constant_extension(v0, cfg);
  int growing = 0;
  for (int n = 0; n < n_max; ++n) {
    Trajectory next = solve_linearized(v0, run.limit, cfg);
    ++run.iterations;
    ZetaMeasure z = zeta_measure(next, run.limit);
    z.n = n;
    if (n > 0) {
      const double prev = run.zeta.back().measure;
      z.ratio = prev > 0.0 ? z.measure / prev : 0.0;
    }
    run.zeta.push_back(z);
    run.previous = std::move(run.limit);
    run.limit = std::move(next);
    if (z.measure < tol) {
      run.status = PicardStatus::Converged;
      return run;
    }
    growing = (n > 0 && z.ratio >= 1.0) ? growing + 1 : 0;
    if (growing >= 3) {
      run.status = PicardStatus::NonContraction;
      return run;
    }
  }
  run.status = PicardStatus::MaxIterations;
  return run;
}

ContractionReport contraction_report(const std::vector<double>& measures, bool converged) {
  ContractionReport r;
  r.measures = measures;
  r.converged = converged;
  std::vector<double> n, y;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (measures[i] > 0.0) {
      n.push_back(double(i));
      y.push_back(std::log(measures[i]));
    }
  }
  if (n.size() >= 2) {
    double sn = 0, sy = 0, snn = 0, sny = 0;
    const double m = double(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
      sn += n[i];
      sy += y[i];
      snn += n[i] * n[i];
      sny += n[i] * y[i];
    }
    r.fitted_ratio = std::exp((m * sny - sn * sy) / (m * snn - sn * sn));
  }
  r.verdict = converged ? "converged" : (r.fitted_ratio < 1.0 ? "contracting" : "not contracting");
  return r;
}

ContractionReport contraction_report(const PicardRun& run) {
  std::vector<double> m;
  for (const auto& z : run.zeta) m.push_back(z.measure);
  return contraction_report(m, run.converged());
}

double sup_h4_difference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw std::invalid_argument("trajectories have different node sets");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, sobolev_norm(a.fields[i] - b.fields[i]));
  return s;
}

}  // namespace kplab
