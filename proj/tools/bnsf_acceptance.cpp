// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bnsf/acceptance.hpp"

int main(int argc, char** argv) {
  bnsf::AcceptanceOptions o;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  const auto results = bnsf::run_acceptance(o, ids, [](const bnsf::CriterionResult& r) {
    std::printf("%s\n", bnsf::format_result(r).c_str());
    std::fflush(stdout);
  });
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
