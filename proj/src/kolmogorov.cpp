#include "kplab/kolmogorov.hpp"

#include <algorithm>
#include <sstream>

namespace kplab {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ExactKolmogorov: return "exact-kolmogorov";
    case Scheme::ImexLinearized: return "imex-linearized";
    case Scheme::ImexNonlinear: return "imex-nonlinear";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "exact-kolmogorov") return Scheme::ExactKolmogorov;
  if (name == "imex-linearized") return Scheme::ImexLinearized;
  if (name == "imex-nonlinear") return Scheme::ImexNonlinear;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

int scheme_id(Scheme s) { return static_cast<int>(s); }

void SolveConfig::validate() const {
  std::ostringstream err;
  if (nx < kMinModes || ny < kMinModes || nx % 2 || ny % 2) err << "grid sizes must be even and >= 8; ";
  if (!(lx > 0.0) || !(ly > 0.0)) err << "box lengths must be positive; ";
  if (!(T > 0.0)) err << "T must be positive; ";
  if (!(dt > 0.0) || dt > T) err << "dt must lie in (0, T]; ";
  if (!(eps >= 0.0)) err << "eps must be non-negative; ";
  if (!(tail_guard > 0.0 && tail_guard < 1.0)) err << "tail_guard must lie in (0, 1); ";
  if (!(guard_band > 0.0 && guard_band < 1.0)) err << "guard_band must lie in (0, 1); ";
  if (save_every < 1) err << "save_every must be >= 1; ";
  if (max_halvings < 0) err << "max_halvings must be >= 0; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument(msg.substr(0, msg.size() - 2));
}

GridPtr SolveConfig::make_grid() const { return kplab::make_grid(nx, ny, lx, ly); }

int SolveConfig::steps() const { return std::max(1, int(std::ceil(T / dt - 1e-9))); }

double kolmogorov_phi(double kx, double ky, double a, double b) {
  const double h = b - a;
  const double m = 0.5 * (a + b);
  const double c = ky - m * kx;
  return h * c * c + kx * kx * h * h * h / 12.0;
}

namespace {

RealArray phi_array(const Grid& g, double a, double b) {
  RealArray p(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p(i, j) = kolmogorov_phi(g.kx[i], g.ky[j], a, b);
  return p;
}

ComplexArray propagate(const ComplexArray& c, const RealArray& phi, double abar) {
  return c * (-abar * phi).exp();
}

// (a - abar) (d_y - t d_x')^2 w, formed pointwise in the sheared frame.
ComplexArray fluctuation(const Field& w, const RealArray& a, double abar, bool dealias) {
  const Grid& g = w.g();
  const RealArray ky = sheared_ky(g, w.t);
  Field lap(w.grid, w.t, -(ky.square()) * w.coeffs);
  const RealArray prod = (a - abar) * to_sheared_samples(lap);
  Field out = from_sheared_samples(w.grid, prod, w.t);
  if (dealias) apply_dealias(out);
  return out.coeffs;
}

RealArray diffusivity(const Field& g) { return (1.0 + to_sheared_samples(g)).square(); }

// a0 at t, am at t + dt/2 from the predictor state.
template <class MidCoefficient>
Field imex_step(const Field& f, const RealArray& a0, MidCoefficient mid, double dt, const SolveConfig& cfg) {
  const Grid& g = f.g();
  const double t0 = f.t, th = f.t + 0.5 * dt, t1 = f.t + dt;
  const double abar0 = a0.mean();

  ComplexArray n0 = fluctuation(f, a0, abar0, cfg.dealias);
  Field wh(f.grid, th, propagate(f.coeffs + (0.5 * dt) * n0, phi_array(g, t0, th), abar0));

  const RealArray am = mid(wh);
  const double abarm = am.mean();
  ComplexArray nh = fluctuation(wh, am, abarm, cfg.dealias);
  Field out(f.grid, t1,
            propagate(f.coeffs, phi_array(g, t0, t1), abarm) + dt * propagate(nh, phi_array(g, th, t1), abarm));

  const double before = sobolev_norm(f);
  const double after = sobolev_norm(out);
  if (after > (1.0 + cfg.growth_limit) * before)
    throw StepRejected("H^4 norm grew by more than the one-step limit");
  const double tail = tail_mass(out, cfg.guard_band);
  if (tail > cfg.tail_guard) throw StepRejected("tail guard tripped");
  return out;
}

using Stepper = std::function<Field(const Field&, double)>;

struct Accumulator {
  double density = 0.0;   // ||d_y w||^2_{H^4} at the current state
  double integral = 0.0;  // trapezoid sum over every accepted substep
};

void advance(Field& w, double dt, int depth, const Stepper& step, const SolveConfig& cfg, Trajectory& tr,
             Accumulator& acc) {
  try {
    Field next = step(w, dt);
    const double d = dissipation_density(next);
    acc.integral += 0.5 * dt * (acc.density + d);
    acc.density = d;
    w = std::move(next);
    ++tr.accepted_steps;
  } catch (const StepRejected& e) {
    ++tr.rejected_steps;
    if (depth >= cfg.max_halvings) {
      std::ostringstream msg;
      msg << "step size halved " << depth << " times at t = " << w.t << " without acceptance (" << e.what()
          << ")";
      throw BlowUp(msg.str());
    }
    const double t_end = w.t + dt;
    advance(w, 0.5 * dt, depth + 1, step, cfg, tr, acc);
    advance(w, t_end - w.t, depth + 1, step, cfg, tr, acc);
  }
}

void record(Trajectory& tr, const Field& w, const SolveConfig& cfg, double integral) {
  tr.dissipation.push_back(integral);
  tr.times.push_back(w.t);
  tr.fields.push_back(w);
  tr.h4.push_back(sobolev_norm(w));
  tr.tail.push_back(tail_mass(w, cfg.guard_band));
}

Trajectory run(const Field& v0, const SolveConfig& cfg, const Stepper& step) {
  cfg.validate();
  if (v0.t != 0.0) throw std::invalid_argument("initial field must sit at t = 0");
  Trajectory tr;
  tr.config = cfg;
  Field w = v0;
  Accumulator acc;
  acc.density = dissipation_density(w);
  record(tr, w, cfg, 0.0);
  const int n = cfg.steps();
  for (int s = 0; s < n; ++s) {
    const double t_next = cfg.T * double(s + 1) / double(n);
    advance(w, t_next - w.t, 0, step, cfg, tr, acc);
    w.t = t_next;
    if ((s + 1) % cfg.save_every == 0 || s + 1 == n) record(tr, w, cfg, acc.integral);
  }
  return tr;
}

}  // namespace

Field Trajectory::at(double t) const {
  if (times.empty()) throw std::out_of_range("empty trajectory");
  if (t <= times.front()) return Field(fields.front().grid, t, fields.front().coeffs);
  if (t >= times.back()) return Field(fields.back().grid, t, fields.back().coeffs);
  const auto hi = std::size_t(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const std::size_t lo = hi - 1;
  const double t0 = times[lo], t1 = times[hi];
  if (t == t0) return Field(fields[lo].grid, t, fields[lo].coeffs);
  const double s = (t - t0) / (t1 - t0);
  return Field(fields[lo].grid, t, (1.0 - s) * fields[lo].coeffs + s * fields[hi].coeffs);
}

Field exact_kolmogorov_step(const Field& f, double dt) {
  if (dt == 0.0) return f;
  return Field(f.grid, f.t + dt, propagate(f.coeffs, phi_array(f.g(), f.t, f.t + dt), 1.0));
}

Field linearized_step(const Field& f, const CoefficientFn& g, double dt, const SolveConfig& cfg) {
  const double th = f.t + 0.5 * dt;
  return imex_step(f, diffusivity(g(f.t)), [&](const Field&) { return diffusivity(g(th)); }, dt, cfg);
}

Field nonlinear_step(const Field& f, double dt, const SolveConfig& cfg) {
  return imex_step(f, diffusivity(f), [](const Field& wh) { return diffusivity(wh); }, dt, cfg);
}

Trajectory solve_exact(const Field& v0, const SolveConfig& cfg) {
  return run(v0, cfg, [](const Field& f, double dt) { return exact_kolmogorov_step(f, dt); });
}

Trajectory solve_linearized(const Field& v0, const CoefficientFn& g, const SolveConfig& cfg) {
  return run(v0, cfg, [&](const Field& f, double dt) { return linearized_step(f, g, dt, cfg); });
}

Trajectory solve_linearized(const Field& v0, const Trajectory& g, const SolveConfig& cfg) {
  return solve_linearized(v0, CoefficientFn([&g](double t) { return g.at(t); }), cfg);
}

Trajectory solve_nonlinear(const Field& v0, const SolveConfig& cfg) {
  return run(v0, cfg, [&](const Field& f, double dt) { return nonlinear_step(f, dt, cfg); });
}

Trajectory solve(const Field& v0, const SolveConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::ExactKolmogorov: return solve_exact(v0, cfg);
    case Scheme::ImexLinearized: {
      GridPtr grid = v0.grid;
      return solve_linearized(v0, CoefficientFn([grid](double t) { return Field::zeros(grid, t); }), cfg);
    }
    case Scheme::ImexNonlinear: return solve_nonlinear(v0, cfg);
  }
  throw std::invalid_argument("unknown scheme");
}

Field kolmogorov_closed_form(const Field& v0, double t) {
  return Field(v0.grid, t, propagate(v0.coeffs, phi_array(v0.g(), 0.0, t), 1.0));
}

}  // namespace kplab
