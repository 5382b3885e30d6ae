#pragma once

#include <vector>

#include "stagroute/instance.hpp"

namespace stagroute {

struct Assignment {
  int route_index = 0;
  double start_s = 0.0;
  bool present = false;
};

/// Per-trip route choice and start time. Entry r describes trip r; absent
/// trips keep their last route/start so staggering-only runs can re-insert
/// them on the same route.
struct Solution {
  std::vector<Assignment> trips;

  static Solution empty(const Instance& inst) {
    Solution s;
    s.trips.assign(inst.trip_count(), {});
    return s;
  }
  std::size_t present_count() const {
    std::size_t n = 0;
    for (const Assignment& a : trips) n += a.present ? 1 : 0;
    return n;
  }
};

struct LegRecord {
  double departure_s = 0.0;
  double arrival_s = 0.0;
  double delay_s = 0.0;
  int flow = 0;
};

struct TripSchedule {
  std::vector<LegRecord> legs;  // one per arc of the chosen route; empty if absent
  double arrival_s() const { return legs.back().arrival_s; }
};

struct Schedule {
  std::vector<TripSchedule> trips;
};

enum class Scope { System, Fleet };

struct CostBreakdown {
  double total_delay_s = 0.0;
  double congestion_s = 0.0;
  double detour_s = 0.0;
  double infeasibility_s = 0.0;
  double alpha = 0.0;
  double cost_s = 0.0;
};

// Event-driven sweep over departures: pops the earliest (time, trip, arc)
// label, counts the flow it meets on the arc, fixes the delay at arc entry
// and pushes the next leg. Ties break by (time, trip id, arc id).
Schedule construct_schedule(const Instance& inst, const Solution& sol);

// Totals over scoped trips: congestion + detour relative to each trip's
// smallest free-flow travel time, plus alpha-weighted lateness. Fleet scope
// sums controlled trips only; the rest still shape congestion.
CostBreakdown evaluate(const Instance& inst, const Solution& sol, const Schedule& sched,
                       double alpha, Scope scope = Scope::System);

// Trips arriving after their latest-arrival time (beyond tolerance).
std::vector<TripId> check_feasibility(const Instance& inst, const Solution& sol,
                                      const Schedule& sched);

// Independent O(n^2) flow recount for (trip, leg): counts trips on the same
// arc whose traversal covers this departure under the same tie discipline as
// the sweep. Test oracle; deliberately ignorant of the event queue.
int recount_flow(const Instance& inst, const Solution& sol, const Schedule& sched, TripId trip,
                 std::size_t leg);

}  // namespace stagroute
