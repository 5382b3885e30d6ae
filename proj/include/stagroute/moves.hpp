#pragma once

#include "stagroute/incremental.hpp"

namespace stagroute {

enum class OperatorMode {
  Integ,  // routes and start times both free
  Stag,   // route pinned to the trip's current assignment
  Bal,    // start pinned to the earliest departure
};

struct MoveCandidate {
  TripId trip = -1;
  int route_index = 0;
  double start_s = 0.0;
  int net_conflict_gain = 0;  // of the last accepted staggering step
  CostBreakdown cost;
};

enum class InsertOrder {
  Earliest,  // ascending earliest departure
  Deadline,  // ascending latest arrival
  Delay,     // descending last-known individual delay
};

/// Shared context for the operators: evaluation weight/scope, mode, and the
/// per-trip delay memory that feeds Delay-ordered reinsertion.
struct MoveContext {
  ScheduleState& state;
  double alpha = 10.0;
  Scope scope = Scope::System;
  OperatorMode mode = OperatorMode::Integ;
  // Start times snap to this grid offset from each trip's earliest departure
  // when positive (used for oracle-comparable runs).
  double start_grid_s = 0.0;
  std::vector<double>* last_delay = nullptr;  // per trip, owned by the solver

  CostBreakdown evaluate_current() const {
    return evaluate(state.instance(), state.solution(), state.schedule(), alpha, scope);
  }
};

// Smallest start-time delay that clears the conflict with the immediately
// preceding trip on this leg's arc, clamped to the staggering window.
// Returns the current start when there is no conflict.
double resolve_conflict_shift(const ScheduleState& state, TripId trip, std::size_t leg);

// Heuristic net gain of moving the trip's start so this leg departs at
// `candidate_start + (current leg offset)`: conflicts resolved minus
// conflicts created on this arc alone, with the leg's delay re-estimated at
// the shifted departure and no downstream re-simulation.
int net_conflict_gain(const ScheduleState& state, TripId trip, std::size_t leg,
                      double candidate_start);

// Largest forward (earlier) start shift that introduces no new conflict on
// any leg; arcs without predecessors impose no bound.
double trim_forward_shift(const ScheduleState& state, TripId trip);

// Best route/start combination for one trip under the context mode: per
// route, reset to the earliest start, repeatedly apply the highest-gain
// conflict-resolving shift while the evaluated cost improves, then trim.
// Leaves the state at the returned candidate.
MoveCandidate best_assignment(MoveContext& ctx, TripId trip);

// Inserts absent trips one at a time via best_assignment, in the given
// order; ends with a repaired schedule.
void insert_trips(MoveContext& ctx, std::vector<TripId> trips, InsertOrder order);

// Records each trip's current delay (for Delay ordering), marks it absent,
// and repairs.
void remove_trips(MoveContext& ctx, const std::vector<TripId>& trips);

// Re-assigns each listed trip (ascending earliest departure) to its best
// route/start when strictly cost-improving; trip count is preserved and the
// post-repair cost never increases.
void local_search(MoveContext& ctx, const std::vector<TripId>& trips);

}  // namespace stagroute
