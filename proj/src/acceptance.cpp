#include "kplab/acceptance.hpp"

#include "kplab/config.hpp"
#include "kplab/diagnostics.hpp"
#include "kplab/experiment.hpp"
#include "kplab/fd_oracle.hpp"
#include "kplab/modified.hpp"
#include "kplab/picard.hpp"
#include "kplab/profiles.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace kplab {

namespace {

// Pinned tolerances.
constexpr double kSemigroupTol = 1e-12;
constexpr double kOrderSlack = 0.2;
constexpr double kPicardRatio = 0.9;
constexpr int kPicardIterations = 12;
constexpr double kPicardGap = 1e-6;
constexpr double kUniformity = 0.10;
constexpr double kDeltaOrder = 0.8;
constexpr double kCommutatorTol = 1e-6;
constexpr double kAdmissible = 2.0;
constexpr double kTableGap = 1e-10;
constexpr double kRadiusTmin = 0.05;
constexpr double kGrowthLo = 0.4, kGrowthHi = 0.6;
// Smallest magnitude for which a per-mode relative error is meaningful.
constexpr double kNormalFloor = 1e-280;

const char* const kNames[kCriterionCount] = {
    "exact-semigroup",    "oracle-equivalence", "scheme-order",    "picard-contraction",
    "energy-uniformity",  "delta-uniformity",   "commutator",      "factorial-H-bounds",
    "derivative-table",   "smoothing-radii",    "trivialities"};

SolveConfig rig() {
  SolveConfig c;
  c.nx = c.ny = 256;
  c.lx = c.ly = 4.0 * M_PI;
  c.T = 0.5;
  c.dt = 1e-3;
  c.scheme = Scheme::ImexNonlinear;
  c.save_every = 10;
  return c;
}

struct Context {
  explicit Context(const AcceptanceOptions& o) : opt(o) {}
  const AcceptanceOptions& opt;
  GridPtr grid = rig().make_grid();
  std::mutex mutex;
  std::map<double, Trajectory> nonlinear;  // Gaussian runs on the rig, keyed by eps

  void log(const std::string& s) {
    std::lock_guard<std::mutex> lock(mutex);
    if (opt.log) *opt.log << "  " << s << std::endl;
  }

  Field gaussian(double eps) {
    ProfileSpec p;
    p.kind = ProfileKind::Gaussian;
    p.eps = eps;
    p.seed = opt.seed;
    return make_profile(grid, p);
  }

  const Trajectory& nonlinear_run(double eps) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      auto it = nonlinear.find(eps);
      if (it != nonlinear.end()) return it->second;
    }
    SolveConfig c = rig();
    c.eps = eps;
    Trajectory tr = solve_nonlinear(gaussian(eps), c);
    std::lock_guard<std::mutex> lock(mutex);
    return nonlinear.emplace(eps, std::move(tr)).first->second;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

template <class F>
void parallel_for(int n, int workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errs(n);
  for (int start = 0; start < n; start += workers) {
    std::vector<std::thread> pool;
    for (int i = start; i < std::min(n, start + workers); ++i)
      pool.emplace_back([&, i] {
        try {
          body(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// Largest per-mode relative error of a solve against the closed-form symbol
// written out as ky^2 t - kx ky t^2 + kx^2 t^3 / 3.
double semigroup_error(const Trajectory& tr, const Field& v0) {
  const Grid& g = v0.g();
  double worst = 0.0;
  for (std::size_t n = 0; n < tr.size(); ++n) {
    const double t = tr.times[n];
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double kx = g.kx[i], ky = g.ky[j];
        const double phi = ky * ky * t - kx * ky * t * t + kx * kx * t * t * t / 3.0;
        const std::complex<double> exact = v0.coeffs(i, j) * std::exp(-phi);
        const std::complex<double> got = tr.fields[n].coeffs(i, j);
        if (std::abs(exact) >= kNormalFloor) worst = std::max(worst, std::abs(got - exact) / std::abs(exact));
        else if (std::abs(got) > 1e3 * kNormalFloor) worst = std::max(worst, 1.0);
      }
    }
  }
  return worst;
}

std::vector<Verdict> criterion1(Context& cx) {
  SolveConfig c = rig();
  c.scheme = Scheme::ImexLinearized;
  const Field v0 = cx.gaussian(1e-3);
  cx.log("g = 0 IMEX solve");
  const Trajectory imex = solve(v0, c);
  cx.log("exact propagator solve");
  const Trajectory exact = solve_exact(v0, c);
  return {make_verdict("C1.imex", "per-mode relative error, g = 0 IMEX path", semigroup_error(imex, v0), "<",
                       kSemigroupTol),
          make_verdict("C1.exact", "per-mode relative error, exact propagator", semigroup_error(exact, v0), "<",
                       kSemigroupTol)};
}

std::vector<Verdict> prefixed(const DiagnosticsReport& r, const std::string& prefix) {
  std::vector<Verdict> out;
  for (auto v : r.verdicts) {
    const auto dot = v.id.find('.');
    v.id = prefix + (dot == std::string::npos ? v.id : v.id.substr(dot));
    out.push_back(v);
  }
  return out;
}

std::vector<Verdict> criterion2(Context& cx) {
  ExperimentConfig cfg;
  cfg.solve.eps = 1e-3;
  RunOptions ro;
  ro.quiet = true;
  ro.write_checkpoints = false;
  cx.log("oracle comparison and self-convergence");
  return prefixed(run_oracle_compare(cfg, ro), "C2");
}

std::vector<Verdict> criterion3(Context& cx) {
  const std::vector<double> dts{4e-3, 2e-3, 1e-3};
  std::vector<Field> finals(dts.size());
  const Field v0 = cx.gaussian(1e-2);
  parallel_for(int(dts.size()), cx.opt.workers, [&](int i) {
    SolveConfig c = rig();
    c.dt = dts[i];
    c.eps = 1e-2;
    c.save_every = c.steps();
    cx.log("nonlinear solve, dt = " + fmt(dts[i]));
    finals[i] = solve_nonlinear(v0, c).fields.back();
  });
  const double e1 = sobolev_norm(finals[0] - finals[1]);
  const double e2 = sobolev_norm(finals[1] - finals[2]);
  const double slope = std::log2(e1 / e2);
  return {make_verdict("C3.order", "|self-convergence slope - 2|", std::abs(slope - 2.0), "<=", kOrderSlack,
                       "slope " + fmt(slope) + ", e1 " + fmt(e1) + ", e2 " + fmt(e2))};
}

std::vector<Verdict> criterion4(Context& cx) {
  std::vector<Verdict> out;
  for (double eps : {1e-3, 3e-4}) {
    SolveConfig c = rig();
    c.eps = eps;
    cx.log("Picard iteration, eps = " + fmt(eps));
    const PicardRun run = picard_solve(cx.gaussian(eps), c, kPicardIterations, 1e-20);
    double worst = 0.0;
    std::string ratios;
    for (const auto& z : run.zeta) {
      if (z.n >= 2) worst = std::max(worst, z.ratio);
      if (z.n >= 1) ratios += (ratios.empty() ? "" : " ") + fmt(z.ratio);
    }
    cx.log("direct nonlinear solve, eps = " + fmt(eps));
    const double gap = sup_h4_difference(run.limit, cx.nonlinear_run(eps));
    const std::string tag = "C4.eps" + fmt(eps);
    out.push_back(make_verdict(tag + ".ratio", "largest zeta ratio from iteration 2", worst, "<", kPicardRatio,
                               "ratios " + ratios));
    out.push_back(make_verdict(tag + ".converged", "solves needed to converge (status " +
                                                       picard_status_name(run.status) + ")",
                               run.converged() ? double(run.iterations) : INFINITY, "<=", kPicardIterations));
    out.push_back(make_verdict(tag + ".limit", "sup-in-time H4 gap to the direct solve", gap, "<", kPicardGap));
  }
  return out;
}

std::vector<Verdict> criterion5(Context& cx) {
  const std::vector<double> eps{1e-2, 3e-3, 1e-3};
  std::vector<double> B(eps.size());
  parallel_for(int(eps.size()), cx.opt.workers, [&](int i) {
    cx.log("nonlinear solve, eps = " + fmt(eps[i]));
    B[i] = energy_certificate(cx.nonlinear_run(eps[i]), eps[i]).implied_B;
  });
  const double lo = *std::min_element(B.begin(), B.end());
  const double hi = *std::max_element(B.begin(), B.end());
  return {make_verdict("C5.uniform", "implied B0 max/min - 1", hi / lo - 1.0, "<", kUniformity,
                       "B0 " + fmt(B[0]) + " " + fmt(B[1]) + " " + fmt(B[2]))};
}

std::vector<Verdict> criterion6(Context& cx) {
  ExperimentConfig cfg;
  cfg.solve.eps = 1e-3;
  RunOptions ro;
  ro.quiet = true;
  ro.workers = cx.opt.workers;
  cx.log("delta sweep on the 128^2 finite-difference grid");
  const DiagnosticsReport r = run_modified(cfg, ro);
  std::vector<Verdict> out;
  const double spread = r.scalars.at("modified.bound_spread");
  const double order = r.scalars.at("modified.order");
  out.push_back(make_verdict("C6.uniform", "bound functional max/min - 1", spread - 1.0, "<", kUniformity));
  out.push_back(make_verdict("C6.order", "distance-to-limit log-log slope", order, ">=", kDeltaOrder));
  return out;
}

std::vector<Verdict> criterion7(Context& cx) {
  const TestFunction f = commutator_test_function();
  const std::vector<double> ladder{4e-3, 2e-3, 1e-3};
  double worst = 0.0, dev = 0.0;
  std::string slopes;
  cx.log("commutator residuals");
  for (double eta : {2.5, 3.0}) {
    for (int k = 1; k <= 3; ++k) {
      const VectorFieldSpec spec{eta, k};
      worst = std::max(worst, commutator_residual(cx.grid, spec, f, 0.5, 1e-4));
      std::vector<double> rs;
      for (double h : ladder) rs.push_back(commutator_residual(cx.grid, spec, f, 0.5, h));
      const double s = loglog_slope(ladder, rs);
      dev = std::max(dev, std::abs(s - 2.0));
      slopes += (slopes.empty() ? "" : " ") + fmt(s);
    }
  }
  return {make_verdict("C7.residual", "largest residual at dt = 1e-4", worst, "<", kCommutatorTol),
          make_verdict("C7.order", "largest |observed order - 2|", dev, "<=", kOrderSlack, "orders " + slopes)};
}

std::vector<Verdict> criterion8(Context& cx) {
  cx.log("vector-field bounds, eps = 1e-3 and 5e-4");
  const BoundFit full = fit_A(cx.nonlinear_run(1e-3), 3.0, 6);
  const BoundFit half = fit_A(cx.nonlinear_run(5e-4), 3.0, 6);
  std::string seq;
  double worst = 0.0;
  for (std::size_t i = 0; i < full.entries.size(); ++i) {
    seq += (seq.empty() ? "" : " ") + fmt(full.entries[i].estimate);
    if (full.entries[i].estimate > 0.0)
      worst = std::max(worst, half.entries[i].estimate / full.entries[i].estimate);
  }
  return {make_verdict("C8.admissible", "A(k) max/median for k in [2, 6]", full.spread, "<", kAdmissible,
                       "A(k) " + seq),
          make_verdict("C8.monotone", "max_k A_half(k) / A(k)", worst, "<=", 1.0)};
}

std::vector<Verdict> criterion9(Context& cx) {
  cx.log("weighted derivative table, l, n <= 4");
  const DerivativeTable tab = mixed_derivative_table(cx.nonlinear_run(1e-3), 3.0, 4, 4);
  const BoundFit L = fit_L(tab.direct);
  return {make_verdict("C9.paths", "relative gap direct vs combination", tab.max_relative_gap, "<", kTableGap),
          make_verdict("C9.admissible", "L(l, n) max/median", L.spread, "<", kAdmissible),
          make_verdict("C9.finite", "fitted L", L.fitted_constant, "<", INFINITY)};
}

std::vector<Verdict> criterion10(Context& cx) {
  ProfileSpec p;
  p.kind = ProfileKind::Algebraic;
  p.eps = 1e-3;
  p.seed = cx.opt.seed;
  const Field v0 = make_profile(cx.grid, p);
  SolveConfig c = rig();
  Trajectory nl, ex;
  parallel_for(2, cx.opt.workers, [&](int i) {
    cx.log(i == 0 ? "nonlinear solve, rough data" : "g = 0 control, rough data");
    if (i == 0) nl = solve_nonlinear(v0, c);
    else ex = solve_exact(v0, c);
  });
  auto radii = [](const Trajectory& tr, std::vector<double>& rx, std::vector<double>& ry) {
    for (const auto& f : tr.fields) {
      const Radii r = analyticity_radius(f);
      rx.push_back(r.rho_x);
      ry.push_back(r.rho_y);
    }
  };
  std::vector<double> rx, ry, cx_, cy_;
  radii(nl, rx, ry);
  radii(ex, cx_, cy_);
  double min_pos = INFINITY, worst_drop = 0.0, control_drop = 0.0;
  for (std::size_t i = 0; i < nl.size(); ++i) {
    if (nl.times[i] >= kRadiusTmin) min_pos = std::min({min_pos, rx[i], ry[i]});
    if (i > 0) worst_drop = std::max({worst_drop, rx[i - 1] - rx[i], ry[i - 1] - ry[i]});
  }
  for (std::size_t i = 1; i < ex.size(); ++i)
    control_drop = std::max({control_drop, cx_[i - 1] - cx_[i], cy_[i - 1] - cy_[i]});
  const double expo = growth_exponent(ex.times, cy_, kRadiusTmin);
  std::vector<Verdict> out;
  out.push_back(make_verdict("C10.positive", "smallest radius for t >= 0.05", min_pos, ">", 0.0,
                             "radii at t = 0: " + fmt(rx[0]) + ", " + fmt(ry[0])));
  out.push_back(make_verdict("C10.monotone", "largest decrease between stored times", worst_drop, "<=", 0.0));
  out.push_back(make_verdict("C10.monotone_control", "g = 0 control: largest decrease between stored times",
                             control_drop, "<=", 0.0));
  Verdict g = make_verdict("C10.growth", "g = 0 control: rho_y growth exponent", expo, ">=", kGrowthLo);
  g.comparison = "in";
  g.threshold = kGrowthHi;
  g.pass = expo >= kGrowthLo && expo <= kGrowthHi;
  g.detail = "range [" + fmt(kGrowthLo) + ", " + fmt(kGrowthHi) + "]";
  out.push_back(g);
  return out;
}

bool all_zero(const Trajectory& tr) {
  for (const auto& f : tr.fields)
    if ((f.coeffs != std::complex<double>(0.0, 0.0)).any()) return false;
  return true;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Verdict> criterion11(Context& cx) {
  std::vector<Verdict> out;
  GridPtr g = make_grid(64, 64, 4.0 * M_PI, 4.0 * M_PI);
  SolveConfig c = rig();
  c.nx = c.ny = 64;
  c.T = 0.1;
  c.save_every = 1;
  const Field zero = Field::zeros(g, 0.0);
  cx.log("zero data");
  bool zeros = true;
  for (Scheme s : {Scheme::ExactKolmogorov, Scheme::ImexLinearized, Scheme::ImexNonlinear}) {
    c.scheme = s;
    zeros = zeros && all_zero(solve(zero, c));
  }
  const PicardRun pr = picard_solve(zero, c, 2, 1e-20);
  zeros = zeros && all_zero(pr.limit) && pr.converged() && pr.iterations == 1;
  const RealArray z = RealArray::Zero(64, 64);
  const OracleTrajectory fd = fd_oracle_solve(g, z, 0.1, 0.25 * fd_oracle_cfl(*g, z));
  zeros = zeros && (fd.samples.back() == 0.0).all();
  out.push_back(make_verdict("C11.zero", "zero data stays exactly zero (1 = yes)", zeros ? 1.0 : 0.0, "==", 1.0));

  cx.log("delta = 0 weighted operator");
  std::mt19937_64 rng(cx.opt.seed);
  RealArray v(64, 64), gg(64, 64);
  for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = unit_from_bits(rng()) - 0.5;
  for (Eigen::Index k = 0; k < gg.size(); ++k) gg.data()[k] = 1e-3 * (unit_from_bits(rng()) - 0.5);
  const RealArray a = modified_rhs(*g, v, gg, 0.0);
  const RealArray b = linearized_rhs_fd(*g, v, gg);
  const bool bitwise = std::memcmp(a.data(), b.data(), sizeof(double) * std::size_t(a.size())) == 0;
  out.push_back(make_verdict("C11.bitwise", "delta = 0 operator bitwise equal (1 = yes)", bitwise ? 1.0 : 0.0, "==", 1.0));

  cx.log("determinism");
  ExperimentConfig cfg;
  cfg.solve.nx = cfg.solve.ny = 64;
  cfg.solve.T = 0.1;
  cfg.modified.nx = cfg.modified.ny = 64;
  cfg.modified.T = 0.1;
  cfg.diagnostics.k_max = 3;
  cfg.diagnostics.l_max = cfg.diagnostics.n_max = 2;
  const auto base = std::filesystem::temp_directory_path() / ("kplab-determinism-" + config_hash(cfg));
  bool same = true;
  for (const std::string cmd : {"diagnose", "modified"}) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      RunOptions ro;
      ro.quiet = true;
      ro.out = base / (cmd + "-" + std::to_string(rep));
      std::filesystem::remove_all(ro.out);
      run_experiment(cfg, cmd, ro);
      std::map<std::string, std::string> files;
      for (const auto& e : std::filesystem::recursive_directory_iterator(ro.out)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        files[std::filesystem::relative(e.path(), ro.out).string()] = slurp(e.path());
      }
      outputs.push_back(std::move(files));
    }
    same = same && !outputs[0].empty() && outputs[0] == outputs[1];
  }
  std::filesystem::remove_all(base);
  out.push_back(make_verdict("C11.determinism", "repeat runs byte-identical (1 = yes)", same ? 1.0 : 0.0, "==", 1.0));
  return out;
}

}  // namespace

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id");
  return kNames[id - 1];
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << " C" << r.id << ' ' << r.name << " (" << fmt(r.seconds) << " s)";
  for (const auto& v : r.checks) {
    s << "\n     " << (v.pass ? "ok  " : "FAIL") << ' ' << v.id << ": " << v.description << " = " << fmt(v.measured)
      << ' ' << (v.comparison == "in" ? "<=" : v.comparison) << ' ' << fmt(v.threshold);
    if (!v.detail.empty()) s << "  [" << v.detail << ']';
  }
  return s.str();
}

DiagnosticsReport run_acceptance(const AcceptanceOptions& opt, std::vector<CriterionResult>* results) {
  using Fn = std::vector<Verdict> (*)(Context&);
  const Fn fns[kCriterionCount] = {criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
                                   criterion7, criterion8, criterion9, criterion10, criterion11};
  Context cx(opt);
  DiagnosticsReport report;
  Table summary{"acceptance", {"criterion", "pass"}, {}};
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult res;
    res.id = id;
    res.name = kNames[id - 1];
    if (opt.log) *opt.log << "C" << id << ' ' << res.name << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      res.checks = fns[id - 1](cx);
    } catch (const std::exception& e) {
      Verdict v;
      v.id = "C" + std::to_string(id) + ".error";
      v.description = "criterion raised an error";
      v.comparison = "==";
      v.detail = e.what();
      res.checks.push_back(v);
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.pass = std::all_of(res.checks.begin(), res.checks.end(), [](const Verdict& v) { return v.pass; });
    if (opt.log) *opt.log << summary_line(res) << std::endl;
    report.verdicts.insert(report.verdicts.end(), res.checks.begin(), res.checks.end());
    report.timings["C" + std::to_string(id)] = res.seconds;
    summary.rows.push_back({double(id), res.pass ? 1.0 : 0.0});
    if (results) results->push_back(res);
  }
  report.tables.push_back(summary);
  return report;
}

}  // namespace kplab
