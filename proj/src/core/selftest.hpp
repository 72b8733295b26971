#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dislocate {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs the library invariant suites; one result per suite.
std::vector<SuiteResult> run_selftest();

// Prints one line per suite; returns 0 iff everything passed.
int selftest_main(std::ostream& os);

}  // namespace dislocate
