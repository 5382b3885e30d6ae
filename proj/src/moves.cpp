#include "stagroute/moves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stagroute {

namespace {

const Route& route_of(const ScheduleState& state, TripId trip) {
  return state.instance().route(trip,
                                state.solution().trips[static_cast<std::size_t>(trip)].route_index);
}

const LegRecord& leg_of(const ScheduleState& state, TripId trip, std::size_t leg) {
  return state.schedule().trips[static_cast<std::size_t>(trip)].legs[leg];
}

// Index of the label right before (dep, trip) on the arc, or npos.
std::size_t predecessor_pos(const std::vector<Label>& labels, double dep, TripId trip) {
  std::size_t lo = 0, hi = labels.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (label_before(labels[mid].departure_s, labels[mid].trip, dep, trip)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo == 0 ? std::string::npos : lo - 1;
}

double snap_up(const Trip& trip, double start, double grid) {
  if (grid <= 0.0) return start;
  const double offset = start - trip.earliest_departure_s;
  const double snapped = std::ceil(offset / grid - kTimeEps) * grid;
  return std::min(trip.earliest_departure_s + snapped,
                  trip.earliest_departure_s + trip.max_stagger_s);
}

}  // namespace

double resolve_conflict_shift(const ScheduleState& state, TripId trip, std::size_t leg) {
  const Trip& t = state.instance().trip(trip);
  const double start = state.trip_start_s(trip);
  const ArcId arc = route_of(state, trip).arcs[leg];
  const LegRecord& rec = leg_of(state, trip, leg);

  const auto& labels = state.arc_labels(arc);
  const std::size_t pred = predecessor_pos(labels, rec.departure_s, trip);
  if (pred == std::string::npos) return start;
  const Label& before = labels[pred];
  if (before.arrival_s <= rec.departure_s + kTimeEps) return start;

  const double shifted = std::min(start + (before.arrival_s - rec.departure_s),
                                  t.earliest_departure_s + t.max_stagger_s);
  return shifted;
}

int net_conflict_gain(const ScheduleState& state, TripId trip, std::size_t leg,
                      double candidate_start) {
  const Instance& inst = state.instance();
  const ArcId arc = route_of(state, trip).arcs[leg];
  const LegRecord& rec = leg_of(state, trip, leg);

  const double dep_old = rec.departure_s;
  const double arr_old = rec.arrival_s;
  const double dep_new = dep_old + (candidate_start - state.trip_start_s(trip));

  const auto& labels = state.arc_labels(arc);
  // Delay re-estimated at the shifted departure from the current labels only.
  int flow_new = 0;
  for (const Label& l : labels) {
    if (l.trip == trip) continue;
    if (label_before(l.departure_s, l.trip, dep_new, trip) && l.arrival_s > dep_new + kTimeEps) {
      ++flow_new;
    }
  }
  const double arr_new = dep_new + inst.arc_nominal_s(arc) + inst.arc_delay(arc, flow_new);

  auto conflicts_at = [&](double dep, double arr) {
    int n = 0;
    for (const Label& l : labels) {
      if (l.trip == trip) continue;
      // The other trip is still traversing when this one departs.
      if (label_before(l.departure_s, l.trip, dep, trip) && l.arrival_s > dep + kTimeEps) ++n;
      // This trip is still traversing when the other departs.
      if (label_before(dep, trip, l.departure_s, l.trip) && arr > l.departure_s + kTimeEps) ++n;
    }
    return n;
  };
  return conflicts_at(dep_old, arr_old) - conflicts_at(dep_new, arr_new);
}

double trim_forward_shift(const ScheduleState& state, TripId trip) {
  const Trip& t = state.instance().trip(trip);
  const double start = state.trip_start_s(trip);
  const Route& route = route_of(state, trip);

  double shift = std::numeric_limits<double>::infinity();
  bool any_bound = false;
  for (std::size_t leg = 0; leg < route.arcs.size(); ++leg) {
    const LegRecord& rec = leg_of(state, trip, leg);
    const auto& labels = state.arc_labels(route.arcs[leg]);
    std::size_t pos = predecessor_pos(labels, rec.departure_s, trip);
    if (pos == std::string::npos) continue;
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= pos; ++i) {
      if (labels[i].trip == trip) continue;
      bound = std::max(bound, std::max(labels[i].departure_s, labels[i].arrival_s));
    }
    if (bound == -std::numeric_limits<double>::infinity()) continue;
    any_bound = true;
    shift = std::min(shift, rec.departure_s - bound);
  }
  if (!any_bound) return t.earliest_departure_s;
  if (shift <= 0.0) return start;
  return std::max(t.earliest_departure_s, start - shift);
}

MoveCandidate best_assignment(MoveContext& ctx, TripId trip) {
  ScheduleState& state = ctx.state;
  const Instance& inst = state.instance();
  const Trip& t = inst.trip(trip);
  const Assignment before = state.solution().trips[static_cast<std::size_t>(trip)];

  std::vector<int> routes_to_try;
  if (ctx.mode == OperatorMode::Stag) {
    routes_to_try.push_back(before.route_index);
  } else {
    for (int i = 0; i < static_cast<int>(t.routes.routes.size()); ++i) routes_to_try.push_back(i);
  }

  auto move_to = [&](int route_index, double start) {
    const Assignment& cur = state.solution().trips[static_cast<std::size_t>(trip)];
    if (!cur.present) {
      state.apply(InsertChange{trip, route_index, start});
    } else if (cur.route_index != route_index) {
      state.apply(RerouteChange{trip, route_index, start});
    } else if (cur.start_s != start) {
      state.apply(StaggerChange{trip, start});
    }
  };

  MoveCandidate best;
  best.trip = trip;
  bool have_best = false;

  for (int route_index : routes_to_try) {
    move_to(route_index, t.earliest_departure_s);
    CostBreakdown cost = ctx.evaluate_current();
    int accepted_gain = 0;

    if (ctx.mode != OperatorMode::Bal) {
      const Route& route = inst.route(trip, route_index);
      const int iteration_cap = static_cast<int>(route.arcs.size()) * 10;
      for (int iter = 0; iter < iteration_cap; ++iter) {
        const double current_start = state.trip_start_s(trip);
        // Highest net-conflict-gain shift across legs; earliest leg wins ties.
        double best_shift = current_start;
        int best_gain = std::numeric_limits<int>::min();
        for (std::size_t leg = 0; leg < route.arcs.size(); ++leg) {
          double cand = resolve_conflict_shift(state, trip, leg);
          cand = snap_up(t, cand, ctx.start_grid_s);
          if (cand <= current_start + kTimeEps) continue;
          const int gain = net_conflict_gain(state, trip, leg, cand);
          if (gain > best_gain) {
            best_gain = gain;
            best_shift = cand;
          }
        }
        if (best_shift <= current_start + kTimeEps) break;
        state.apply(StaggerChange{trip, best_shift});
        const CostBreakdown shifted = ctx.evaluate_current();
        if (shifted.cost_s < cost.cost_s) {
          cost = shifted;
          accepted_gain = best_gain;
        } else {
          state.apply(StaggerChange{trip, current_start});
          break;
        }
      }

      // Trim the shift back as far as it stays free; keep only if the cost
      // does not increase.
      const double current_start = state.trip_start_s(trip);
      double trimmed = trim_forward_shift(state, trip);
      trimmed = snap_up(t, trimmed, ctx.start_grid_s);
      if (trimmed < current_start - kTimeEps) {
        state.apply(StaggerChange{trip, trimmed});
        const CostBreakdown after = ctx.evaluate_current();
        if (after.cost_s <= cost.cost_s) {
          cost = after;
        } else {
          state.apply(StaggerChange{trip, current_start});
        }
      }
    }

    if (!have_best || cost.cost_s < best.cost.cost_s) {
      have_best = true;
      best.route_index = route_index;
      best.start_s = state.trip_start_s(trip);
      best.net_conflict_gain = accepted_gain;
      best.cost = cost;
    }
  }

  move_to(best.route_index, best.start_s);
  return best;
}

void insert_trips(MoveContext& ctx, std::vector<TripId> trips, InsertOrder order) {
  const Instance& inst = ctx.state.instance();
  std::sort(trips.begin(), trips.end(), [&](TripId a, TripId b) {
    switch (order) {
      case InsertOrder::Earliest: {
        const double ea = inst.trip(a).earliest_departure_s;
        const double eb = inst.trip(b).earliest_departure_s;
        if (ea != eb) return ea < eb;
        break;
      }
      case InsertOrder::Deadline: {
        const double la = inst.trip(a).latest_arrival_s;
        const double lb = inst.trip(b).latest_arrival_s;
        if (la != lb) return la < lb;
        break;
      }
      case InsertOrder::Delay: {
        const double da = ctx.last_delay ? (*ctx.last_delay)[static_cast<std::size_t>(a)] : 0.0;
        const double db = ctx.last_delay ? (*ctx.last_delay)[static_cast<std::size_t>(b)] : 0.0;
        if (da != db) return da > db;
        break;
      }
    }
    return a < b;
  });
  for (TripId r : trips) best_assignment(ctx, r);
  ctx.state.repair();
}

void remove_trips(MoveContext& ctx, const std::vector<TripId>& trips) {
  if (ctx.last_delay) {
    for (TripId r : trips) {
      const Assignment& a = ctx.state.solution().trips[static_cast<std::size_t>(r)];
      const double arrival = ctx.state.trip_arrival_s(r);
      (*ctx.last_delay)[static_cast<std::size_t>(r)] =
          arrival - a.start_s - ctx.state.instance().baseline_free_flow_s(r);
    }
  }
  ctx.state.remove(trips);
}

void local_search(MoveContext& ctx, const std::vector<TripId>& trips) {
  ScheduleState& state = ctx.state;
  const Solution before_sol = state.solution();
  const CostBreakdown before = ctx.evaluate_current();

  std::vector<TripId> ordered;
  for (TripId r : trips) {
    if (state.solution().trips[static_cast<std::size_t>(r)].present) ordered.push_back(r);
  }
  const Instance& inst = state.instance();
  std::sort(ordered.begin(), ordered.end(), [&](TripId a, TripId b) {
    const double ea = inst.trip(a).earliest_departure_s;
    const double eb = inst.trip(b).earliest_departure_s;
    if (ea != eb) return ea < eb;
    return a < b;
  });

  for (TripId r : ordered) {
    const Assignment prev = state.solution().trips[static_cast<std::size_t>(r)];
    const CostBreakdown cost_before = ctx.evaluate_current();
    const MoveCandidate cand = best_assignment(ctx, r);
    if (!(cand.cost.cost_s < cost_before.cost_s)) {
      // Not strictly improving: put the previous assignment back.
      if (state.solution().trips[static_cast<std::size_t>(r)].route_index != prev.route_index) {
        state.apply(RerouteChange{r, prev.route_index, prev.start_s});
      } else if (state.solution().trips[static_cast<std::size_t>(r)].start_s != prev.start_s) {
        state.apply(StaggerChange{r, prev.start_s});
      }
    }
  }
  state.repair();

  // Incremental drift can make an in-flight "improvement" a wash after the
  // repair; the operator contract is nonincreasing cost, so fall back.
  const CostBreakdown after = ctx.evaluate_current();
  if (after.cost_s > before.cost_s) {
    state.reset(before_sol);
  }
}

}  // namespace stagroute
