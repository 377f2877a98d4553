#include "kplab/acceptance.hpp"
#include "kplab/experiment.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  kplab::AcceptanceOptions opt;
  opt.workers = kplab::workers_from_env();
  opt.log = &std::cerr;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));

  std::vector<kplab::CriterionResult> results;
  kplab::run_acceptance(opt, &results);

  int failed = 0;
  std::cout << "\nacceptance summary\n";
  for (const auto& r : results) {
    std::cout << kplab::summary_line(r) << '\n';
    if (!r.pass) ++failed;
  }
  std::cout << results.size() - failed << " of " << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
