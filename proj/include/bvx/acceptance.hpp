#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bvx {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criteria to run (1..10); empty runs all.
  std::vector<int> only;
  int threads = 1;
  /// Scratch directory for files written by the IO checks.
  std::string work_dir = ".";
  /// One line per criterion is printed here as it completes (may be null).
  std::ostream* out = nullptr;
};

/// Runs the acceptance suite. Each criterion reports pass/fail with its
/// measured values.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// "criterion  3 PASS  <title>: <detail>"
std::string format_result(const CriterionResult& r);

}  // namespace bvx
