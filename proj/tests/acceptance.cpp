// Runs the acceptance items (all, or the ids given as arguments) and prints
// one PASS/FAIL line for each. Exit status 1 when any item fails.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "polylab/suites.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& [id, fn] : polylab::criteria()) ids.push_back(id);
  int failed = 0;
  for (int id : ids) {
    auto r = polylab::run_criterion(id);
    std::printf("%s\n", polylab::format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed ? 1 : 0;
}
