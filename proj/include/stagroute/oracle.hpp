#pragma once

#include <optional>

#include "stagroute/schedule.hpp"

namespace stagroute {

/// Start-time grid for exhaustive search: {e_r, e_r + step, ...} up to and
/// including e_r + max_stagger.
struct OracleGrid {
  double step_s = 1.0;
  bool feasible_only = false;
  double alpha = 10.0;
  Scope scope = Scope::System;
  long max_combinations = 1'000'000;
};

std::vector<double> grid_starts(const Trip& trip, double step_s);

struct OracleResult {
  Solution solution;
  CostBreakdown cost;
  long combinations = 0;
  bool found = false;  // false only when feasible_only filters everything out
};

// Evaluates every (route, grid start) combination of every trip with the
// regular schedule construction and cost evaluation (shared code path) and
// returns the minimum-cost assignment. Ties resolve to the combination that
// enumerates first, i.e. lexicographically by (trip id, route index, start).
// Refuses with BudgetError when the product exceeds max_combinations.
OracleResult solve_exhaustive(const Instance& inst, const OracleGrid& grid);

}  // namespace stagroute
