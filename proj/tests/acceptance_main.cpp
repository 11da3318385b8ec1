// Release gate: runs the full criteria suite (or a single criterion given
// its id) and reports one line per criterion.  Exit status is the number
// of failures, so each criterion can be registered individually with ctest.
#include <cstdio>
#include <cstdlib>

#include "qstat/verify.hpp"

namespace {

void print(const qstat::CriterionResult& r) {
  std::printf("[%s] %2d %s: measured %.6g vs threshold %.6g\n",
              r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured,
              r.threshold);
  if (!r.detail.empty()) std::printf("          %s\n", r.detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  int failed = 0;
  if (argc > 1) {
    const auto r = qstat::run_criterion(std::atoi(argv[1]));
    print(r);
    failed = r.pass ? 0 : 1;
  } else {
    for (const auto& r : qstat::run_acceptance()) {
      print(r);
      if (!r.pass) ++failed;
    }
  }
  return failed;
}
