#include "stagroute/oracle.hpp"

#include <cmath>

namespace stagroute {

std::vector<double> grid_starts(const Trip& trip, double step_s) {
  if (!(step_s > 0.0)) throw UsageError("oracle: grid step must be > 0");
  std::vector<double> starts;
  const double e = trip.earliest_departure_s;
  const double last = e + trip.max_stagger_s;
  for (double s = e; s < last - kTimeEps; s += step_s) starts.push_back(s);
  starts.push_back(last);  // both window endpoints always included
  return starts;
}

OracleResult solve_exhaustive(const Instance& inst, const OracleGrid& grid) {
  const std::size_t n = inst.trip_count();
  std::vector<std::vector<double>> starts(n);
  long combinations = 1;
  for (std::size_t r = 0; r < n; ++r) {
    starts[r] = grid_starts(inst.trips()[r], grid.step_s);
    const long options = static_cast<long>(starts[r].size()) *
                         static_cast<long>(inst.trips()[r].routes.routes.size());
    if (combinations > grid.max_combinations / std::max(options, 1L)) {
      throw BudgetError("oracle: combination budget exceeded (" +
                        std::to_string(grid.max_combinations) + " allowed, >= " +
                        std::to_string(combinations) + " x " + std::to_string(options) +
                        " required)");
    }
    combinations *= options;
  }

  OracleResult out;
  out.combinations = combinations;
  Solution sol = Solution::empty(inst);
  for (auto& a : sol.trips) a.present = true;

  // Odometer over (route, start) choices, most significant digit first so
  // enumeration order is lexicographic in (trip id, route index, start).
  std::vector<int> route_idx(n, 0);
  std::vector<std::size_t> start_idx(n, 0);
  bool done = n == 0;
  while (!done) {
    for (std::size_t r = 0; r < n; ++r) {
      sol.trips[r].route_index = route_idx[r];
      sol.trips[r].start_s = starts[r][start_idx[r]];
    }
    const Schedule sched = construct_schedule(inst, sol);
    const CostBreakdown cost = evaluate(inst, sol, sched, grid.alpha, grid.scope);
    const bool admissible = !grid.feasible_only || cost.infeasibility_s <= 0.0;
    if (admissible && (!out.found || cost.cost_s < out.cost.cost_s)) {
      out.found = true;
      out.solution = sol;
      out.cost = cost;
    }

    // Advance the least significant digit (last trip's start).
    std::size_t r = n;
    while (r > 0) {
      --r;
      if (++start_idx[r] < starts[r].size()) break;
      start_idx[r] = 0;
      if (++route_idx[r] < static_cast<int>(inst.trips()[r].routes.routes.size())) break;
      route_idx[r] = 0;
      if (r == 0) done = true;
    }
  }
  return out;
}

}  // namespace stagroute
