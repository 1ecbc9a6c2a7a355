#pragma once

#include <string>
#include <vector>

namespace asymdet::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// The eleven acceptance criteria, each with its pinned configuration,
// trial count and tolerance. Ids 1..11.
CriterionResult run_criterion(int id);

// Named suites exposed by the check subcommand.
std::vector<int> suite_criteria(const std::string& suite);
std::vector<std::string> suite_names();

// Runs the given criteria, prints one PASS/FAIL line each to stdout,
// and returns true when all passed.
bool run_and_report(const std::vector<int>& ids);

}  // namespace asymdet::acceptance
