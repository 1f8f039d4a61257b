#include "tropkp/checks/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  tropkp::checks::AcceptanceOptions options;
  if (argc > 2 || (argc == 2 && std::string(argv[1]).find_first_not_of("0123456789") != std::string::npos)) {
    std::cerr << "usage: " << argv[0] << " [seed]" << std::endl;
    return 2;
  }
  if (argc == 2) options.seed = std::stoull(argv[1]);
  int failed = 0;
  for (int id = 1; id <= tropkp::checks::kCriterionCount; ++id) {
    const auto result = tropkp::checks::run_criterion(id, options);
    std::cout << tropkp::checks::format_line(result) << std::endl;
    if (!result.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
