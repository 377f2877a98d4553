#include "kplab/config.hpp"
#include "kplab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"kplab: pseudo-spectral laboratory for the degenerate Kolmogorov equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve the Cauchy problem and checkpoint the trajectory"},
      {"picard", "run the successive-linearization scheme and report contraction"},
      {"modified", "sweep the weighted system over delta"},
      {"diagnose", "vector-field bounds, derivative table, radii and energy certificate"},
      {"commutator-check", "check the commutator identity and its time-difference order"},
      {"oracle-compare", "cross-check against the finite-difference oracle"},
      {"suite", "run the full acceptance matrix"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file (key = value)");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "seed for the random-phase profile");
    sub->add_flag("--quiet", quiet, "suppress progress output");
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  kplab::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = kplab::parse_config(config_path);
  } catch (const kplab::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << '\n';
    return 2;
  }
  if (seed != 0) cfg.profile.seed = seed;
  if (!out_dir.empty()) cfg.output_directory = out_dir;

  kplab::RunOptions opt;
  opt.out = cfg.output_directory;
  opt.quiet = quiet;
  opt.workers = kplab::workers_from_env();
  cfg.modified.workers = opt.workers;

  const kplab::DiagnosticsReport r = kplab::run_experiment(cfg, command, opt);
  if (!quiet) {
    for (const auto& v : r.verdicts)
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.id << "  " << v.description << " = " << v.measured << ' '
                << (v.comparison == "in" ? "<=" : v.comparison) << ' ' << v.threshold << '\n';
    if (r.failed) std::cout << "FAILED: " << r.error << '\n';
    std::cout << "outputs in " << opt.out.string() << '\n';
  }
  return r.all_pass() ? 0 : 1;
}
