#include <iostream>

#include "kldesign_cli/acceptance.hpp"

int main(int argc, char** argv) {
  kld::cli::AcceptanceOptions options;
  if (argc > 1) options.work_dir = argv[1];
  kld::cli::AcceptanceSuite suite(options);
  int failed = 0;
  suite.run_all([&](const kld::cli::CriterionResult& r) {
    if (!r.passed) ++failed;
    std::cout << kld::cli::format_result_line(r) << std::endl;
  });
  std::cout << (failed == 0 ? "acceptance: all criteria passed" : "acceptance: failures") << std::endl;
  return failed == 0 ? 0 : 1;
}
