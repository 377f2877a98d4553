#include <doctest.h>

#include "kplab/checkpoint.hpp"
#include "kplab/config.hpp"
#include "kplab/diagnostics.hpp"
#include "kplab/experiment.hpp"
#include "kplab/report.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

using namespace kplab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("kplab-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> error_list(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("config defaults from a minimal file") {
  ExperimentConfig c = parse_config_text("# nothing but a comment\n\n");
  CHECK(c.solve.nx == 256);
  CHECK(c.solve.ny == 256);
  CHECK(c.solve.lx == doctest::Approx(4 * M_PI));
  CHECK(c.solve.ly == doctest::Approx(4 * M_PI));
  CHECK(c.diagnostics.eta == 3.0);
  CHECK(c.solve.T == 0.5);
}

TEST_CASE("config values and reals with pi") {
  CHECK(parse_real("4pi") == doctest::Approx(4 * M_PI));
  CHECK(parse_real("0.5*pi") == doctest::Approx(0.5 * M_PI));
  CHECK(parse_real("pi") == doctest::Approx(M_PI));
  CHECK(parse_real("-1e-3") == -1e-3);
  CHECK_THROWS(parse_real("four"));

  ExperimentConfig c = parse_config_text("grid.nx = 64\ngrid.lx = 2pi\nsolve.scheme = imex-linearized\n"
                                         "modified.deltas = 0.2, 0.1, 0.05\noutput.formats = csv\n");
  CHECK(c.solve.nx == 64);
  CHECK(c.solve.lx == doctest::Approx(2 * M_PI));
  CHECK(c.solve.scheme == Scheme::ImexLinearized);
  CHECK(c.deltas == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.formats == std::vector<std::string>{"csv"});
}

TEST_CASE("config errors name the key and are all collected") {
  auto errs = error_list("solve.dt = -0.1\n");
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "solve.dt"));

  errs = error_list("solver.dt = 0.1\n");
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "solver.dt"));
  CHECK(mentions(errs, "did you mean 'solve.dt'"));

  errs = error_list("grid.nx = 7\ngrid.ly = abc\npicard.n_max = 1\nbogus\n");
  CHECK(errs.size() == 4);
  CHECK(mentions(errs, "grid.nx"));
  CHECK(mentions(errs, "grid.ly"));
  CHECK(mentions(errs, "picard.n_max"));

  CHECK_THROWS_AS(parse_config("/nonexistent/kplab.cfg"), ConfigError);
  CHECK(edit_distance("solver", "solve") == 1);
}

TEST_CASE("config hash and canonical text") {
  ExperimentConfig a;
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.output_directory = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.solve.dt = 2e-3;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig round = parse_config_text(canonical_text(b));
  CHECK(canonical_text(round) == canonical_text(b));
  CHECK(config_keys().size() > 30);
}

TEST_CASE("report JSON round trip") {
  DiagnosticsReport r;
  r.run_id = "diagnose-0123";
  r.command = "diagnose";
  r.config_hash = "0123456789abcdef";
  r.tables.push_back({"radii", {"t", "rho_x", "rho_y"}, {{0.0, kRadiusInfinity, 1.5}, {0.1, 0.25, 0.125}}});
  r.scalars["A"] = 0.1;
  r.verdicts.push_back(make_verdict("C8.admissible", "spread", 2.2, "<", 2.0, "note"));
  r.timings["total"] = 1.25;
  r.failed = true;
  r.error = "boom";
  CHECK_FALSE(r.verdicts[0].pass);
  CHECK_FALSE(r.all_pass());
  DiagnosticsReport back = report_from_json(nlohmann::json::parse(to_json(r).dump()));
  CHECK(back == r);

  CHECK(make_verdict("x", "d", 3.0, ">=", 3.0).pass);
  CHECK(format_number(-kRadiusInfinity) == "-inf");
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("emit_report writes a manifest and one CSV per table") {
  fs::path dir = scratch("emit");
  DiagnosticsReport empty;
  auto files = emit_report(empty, dir, {"json", "csv"});
  REQUIRE(files.size() == 1);
  CHECK(files[0].filename() == "manifest.json");

  DiagnosticsReport one;
  one.config_hash = "feedfacecafebeef";
  one.tables.push_back({"norm_curve", {"t", "h4"}, {{0.0, 1e-3}, {0.5, 9e-4}}});
  files = emit_report(one, dir, {"json", "csv"});
  CHECK(files.size() == 2);
  const std::string csv = slurp(dir / "norm_curve.csv");
  CHECK(csv.rfind("# config_hash=feedfacecafebeef", 0) == 0);
  CHECK(csv.find("t,h4\n") != std::string::npos);
  CHECK(csv.find("0.5,0.00089999999999999998") != std::string::npos);

  CHECK_THROWS_AS(emit_report(one, "/proc/kplab-cannot-write", {"csv"}), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip is bit exact") {
  SolveConfig cfg;
  cfg.nx = cfg.ny = 32;
  cfg.lx = cfg.ly = M_PI;
  cfg.T = 0.05;
  cfg.scheme = Scheme::ExactKolmogorov;
  auto g = cfg.make_grid();
  Field v0(g, 0.0);
  v0.coeffs(1, 2) = {1e-3, -2e-4};
  v0.coeffs(31, 30) = {1e-3, 2e-4};
  Trajectory tr = solve(v0, cfg);

  fs::path dir = scratch("checkpoint");
  write_checkpoint(dir, tr, "00000000deadbeef");
  std::string hash;
  Trajectory back = read_checkpoint(dir, &hash);
  CHECK(hash == "00000000deadbeef");
  REQUIRE(back.size() == tr.size());
  CHECK(back.config.scheme == Scheme::ExactKolmogorov);
  for (std::size_t n = 0; n < tr.size(); ++n) {
    CHECK(back.times[n] == tr.times[n]);
    CHECK(back.h4[n] == tr.h4[n]);
    CHECK(back.dissipation[n] == tr.dissipation[n]);
    CHECK(std::memcmp(back.fields[n].coeffs.data(), tr.fields[n].coeffs.data(),
                      sizeof(std::complex<double>) * tr.fields[n].coeffs.size()) == 0);
  }
  const std::string rec = slurp(dir / "r000000.bin");
  CHECK(rec.substr(0, 8) == "KPLABF01");

  std::ofstream(dir / "r000000.bin", std::ios::binary) << "KPLABX99";
  CHECK_THROWS(read_record(dir / "r000000.bin"));
  fs::remove_all(dir);
}

TEST_CASE("zero-profile solve run: all-zero outputs, all pass, deterministic") {
  ExperimentConfig cfg = parse_config_text("grid.nx = 32\ngrid.ny = 32\ngrid.lx = pi\ngrid.ly = pi\n"
                                           "solve.T = 0.05\nsolve.profile = zero\n");
  fs::path a = scratch("run-a"), b = scratch("run-b");
  RunOptions opt;
  opt.quiet = true;
  opt.out = a;
  DiagnosticsReport ra = run_experiment(cfg, "solve", opt);
  opt.out = b;
  DiagnosticsReport rb = run_experiment(cfg, "solve", opt);
  CHECK_FALSE(ra.failed);
  CHECK(ra.all_pass());
  CHECK(ra.run_id == rb.run_id);
  CHECK(ra.run_id == "solve-" + config_hash(cfg));

  int csvs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    const std::string text = slurp(e.path());
    CHECK(text == slurp(b / e.path().filename()));
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // hash header
    std::getline(lines, line);  // column names
    while (std::getline(lines, line)) {
      std::istringstream cells(line);
      std::string cell;
      bool first = true;
      while (std::getline(cells, cell, ',')) {
        if (!first) CHECK(std::stod(cell) == 0.0);
        first = false;
      }
    }
  }
  CHECK(csvs >= 1);
  fs::remove_all(a);
  fs::remove_all(b);
}
