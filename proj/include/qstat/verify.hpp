#pragma once

#include <string>
#include <vector>

namespace qstat {

// Self-contained release gate: every check the library promises to satisfy,
// with the measured figure and the threshold it is held to.

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string detail;      // what was measured, worst grid point, etc.
  double measured = 0.0;   // worst value over the criterion's grid
  double threshold = 0.0;
  bool pass = false;
};

// Runs all criteria (1..11) or a single one; ids outside that range throw
// std::out_of_range.
std::vector<CriterionResult> run_acceptance();
CriterionResult run_criterion(int id);

}  // namespace qstat
