#pragma once

#include <string>
#include <vector>

namespace dsqw::verify {

// One end-to-end self-check. `detail` carries the measured numbers and the
// bound they were held to, so a failing line is diagnosable on its own.
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every check in order. `threads` caps the worker count of the
// ensemble-based checks (0 = hardware concurrency); the parallel-determinism
// check manages its own worker counts. A check that throws is reported as
// failed with the exception text, and the remaining checks still run.
std::vector<CheckResult> run_all(int threads = 0);

bool all_passed(const std::vector<CheckResult>& results);

// "ok   3 momentum-subspace-exactness   max drift 2.1e-15 (bound 1e-12)".
std::string format_line(const CheckResult& result);

}  // namespace dsqw::verify
