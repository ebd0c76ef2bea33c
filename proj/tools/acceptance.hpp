#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace combwalk::acceptance {

enum class Suite { Fast, Full };

/// Parses "fast" / "full"; throws std::invalid_argument otherwise.
Suite parse_suite(const std::string& name);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// One line per criterion, as printed by run_suite.
std::string format_line(const CriterionResult& r);

/**
 * Run criteria 1..10 (or only those listed in `only`), printing each line to
 * `out` as it completes. `fast` divides Monte Carlo replica counts by 10 and
 * keeps every tolerance.
 */
std::vector<CriterionResult> run_suite(Suite suite, std::ostream& out,
                                       const std::vector<int>& only = {});

}  // namespace combwalk::acceptance
