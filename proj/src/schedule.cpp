#include "stagroute/schedule.hpp"

#include <algorithm>
#include <limits>
#include <cassert>
#include <queue>

namespace stagroute {

namespace {

struct Event {
  double time;
  TripId trip;
  int leg;
  ArcId arc;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.trip != b.trip) return a.trip > b.trip;
    return a.arc > b.arc;
  }
};

}  // namespace

Schedule construct_schedule(const Instance& inst, const Solution& sol) {
  Schedule sched;
  sched.trips.assign(inst.trip_count(), {});

  std::priority_queue<Event, std::vector<Event>, EventLater> queue;
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    const Assignment& a = sol.trips[static_cast<std::size_t>(r)];
    if (!a.present) continue;
    const Route& route = inst.route(r, a.route_index);
    sched.trips[static_cast<std::size_t>(r)].legs.assign(route.arcs.size(), {});
    queue.push({a.start_s, r, 0, route.arcs.front()});
  }

  // Completion times of already-processed traversals, per arc, kept sorted.
  std::vector<std::vector<double>> arrivals(inst.network().arc_count());

  double last_time = -std::numeric_limits<double>::infinity();
  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    assert(ev.time >= last_time);
    last_time = ev.time;

    auto& done = arrivals[static_cast<std::size_t>(ev.arc)];
    const auto first_open = std::upper_bound(done.begin(), done.end(), ev.time + kTimeEps);
    const int flow = static_cast<int>(done.end() - first_open);
    const double delay = inst.arc_delay(ev.arc, flow);
    const double arrival = ev.time + inst.arc_nominal_s(ev.arc) + delay;
    done.insert(std::upper_bound(done.begin(), done.end(), arrival), arrival);

    LegRecord& leg = sched.trips[static_cast<std::size_t>(ev.trip)].legs[static_cast<std::size_t>(ev.leg)];
    leg = {ev.time, arrival, delay, flow};

    const Route& route =
        inst.route(ev.trip, sol.trips[static_cast<std::size_t>(ev.trip)].route_index);
    if (static_cast<std::size_t>(ev.leg) + 1 < route.arcs.size()) {
      queue.push({arrival, ev.trip, ev.leg + 1, route.arcs[static_cast<std::size_t>(ev.leg) + 1]});
    }
  }
  return sched;
}

CostBreakdown evaluate(const Instance& inst, const Solution& sol, const Schedule& sched,
                       double alpha, Scope scope) {
  CostBreakdown out;
  out.alpha = alpha;
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    const Assignment& a = sol.trips[static_cast<std::size_t>(r)];
    if (!a.present) continue;
    const Trip& trip = inst.trip(r);
    if (scope == Scope::Fleet && !trip.controlled) continue;

    const double arrival = sched.trips[static_cast<std::size_t>(r)].arrival_s();
    const double chosen_ff = inst.route(r, a.route_index).free_flow_s;
    out.detour_s += chosen_ff - inst.baseline_free_flow_s(r);
    out.congestion_s += arrival - a.start_s - chosen_ff;
    out.infeasibility_s += std::max(0.0, arrival - trip.latest_arrival_s);
  }
  out.total_delay_s = out.congestion_s + out.detour_s;
  out.cost_s = out.total_delay_s + alpha * out.infeasibility_s;
  return out;
}

std::vector<TripId> check_feasibility(const Instance& inst, const Solution& sol,
                                      const Schedule& sched) {
  std::vector<TripId> late;
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    if (!sol.trips[static_cast<std::size_t>(r)].present) continue;
    if (sched.trips[static_cast<std::size_t>(r)].arrival_s() >
        inst.trip(r).latest_arrival_s + kTimeEps) {
      late.push_back(r);
    }
  }
  return late;
}

int recount_flow(const Instance& inst, const Solution& sol, const Schedule& sched, TripId trip,
                 std::size_t leg) {
  const Assignment& a = sol.trips[static_cast<std::size_t>(trip)];
  const ArcId arc = inst.route(trip, a.route_index).arcs[leg];
  const LegRecord& mine = sched.trips[static_cast<std::size_t>(trip)].legs[leg];

  int flow = 0;
  for (TripId other = 0; other < static_cast<TripId>(inst.trip_count()); ++other) {
    if (other == trip) continue;
    const Assignment& oa = sol.trips[static_cast<std::size_t>(other)];
    if (!oa.present) continue;
    const Route& route = inst.route(other, oa.route_index);
    for (std::size_t j = 0; j < route.arcs.size(); ++j) {
      if (route.arcs[j] != arc) continue;
      const LegRecord& theirs = sched.trips[static_cast<std::size_t>(other)].legs[j];
      const bool departed_first = theirs.departure_s < mine.departure_s ||
                                  (theirs.departure_s == mine.departure_s && other < trip);
      if (departed_first && theirs.arrival_s > mine.departure_s + kTimeEps) ++flow;
    }
  }
  return flow;
}

}  // namespace stagroute
