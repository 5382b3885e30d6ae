#include "stagroute/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stagroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t slot(TripId trip, int leg) {
  return (static_cast<std::uint64_t>(trip) << 16) | static_cast<std::uint64_t>(leg);
}

// First position whose label sorts at or after (dep, trip).
std::size_t position_of(const std::vector<Label>& labels, double dep, TripId trip) {
  return static_cast<std::size_t>(
      std::lower_bound(labels.begin(), labels.end(), std::pair<double, TripId>{dep, trip},
                       [](const Label& l, const std::pair<double, TripId>& key) {
                         return label_before(l.departure_s, l.trip, key.first, key.second);
                       }) -
      labels.begin());
}

}  // namespace

std::vector<TripId> activation_range(const std::vector<Label>& sorted_labels, TripId self,
                                     double dep_old, double arr_old, double dep_new,
                                     double arr_new) {
  const std::size_t i_old = position_of(sorted_labels, dep_old, self);
  const std::size_t j_old = position_of(sorted_labels, arr_old, self);
  const std::size_t i_new = position_of(sorted_labels, dep_new, self);
  const std::size_t j_new = position_of(sorted_labels, arr_new, self);

  std::vector<TripId> out;
  auto covered_only_here = [&](std::size_t lo, std::size_t hi, std::size_t other_lo,
                               std::size_t other_hi) {
    for (std::size_t pos = lo; pos < hi; ++pos) {
      if (pos >= other_lo && pos < other_hi) continue;  // intersection: status unchanged
      if (sorted_labels[pos].trip != self) out.push_back(sorted_labels[pos].trip);
    }
  };
  covered_only_here(i_old, j_old, i_new, j_new);
  covered_only_here(i_new, j_new, i_old, j_old);
  std::sort(out.begin(), out.end());
  return out;
}

ScheduleState::ScheduleState(const Instance& inst) : inst_(&inst) {
  sol_ = Solution::empty(inst);
  reset(sol_);
}

void ScheduleState::reset(const Solution& sol) {
  sol_ = sol;
  repair();
}

void ScheduleState::repair() {
  sched_ = construct_schedule(*inst_, sol_);
  rebuild_index();
}

void ScheduleState::rebuild_index() {
  inactive_.assign(inst_->network().arc_count(), {});
  active_on_arc_.assign(inst_->network().arc_count(), {});
  is_active_.assign(inst_->trip_count(), 0);
  active_trips_.clear();
  for (TripId r = 0; r < static_cast<TripId>(inst_->trip_count()); ++r) {
    if (!sol_.trips[static_cast<std::size_t>(r)].present) continue;
    const Route& route = chosen_route(r);
    const auto& legs = sched_.trips[static_cast<std::size_t>(r)].legs;
    for (std::size_t i = 0; i < route.arcs.size(); ++i) {
      inactive_[static_cast<std::size_t>(route.arcs[i])].push_back(
          {legs[i].departure_s, legs[i].arrival_s, r});
    }
  }
  for (auto& labels : inactive_) {
    std::sort(labels.begin(), labels.end(), [](const Label& a, const Label& b) {
      return label_before(a.departure_s, a.trip, b.departure_s, b.trip);
    });
  }
}

double ScheduleState::trip_arrival_s(TripId r) const {
  return sched_.trips[static_cast<std::size_t>(r)].arrival_s();
}

void ScheduleState::activate(TripId r) {
  if (is_active_[static_cast<std::size_t>(r)]) return;
  is_active_[static_cast<std::size_t>(r)] = 1;
  active_trips_.push_back(r);
  if (!sol_.trips[static_cast<std::size_t>(r)].present) return;
  const Route& route = chosen_route(r);
  const auto& legs = sched_.trips[static_cast<std::size_t>(r)].legs;
  for (std::size_t i = 0; i < route.arcs.size(); ++i) {
    auto& labels = inactive_[static_cast<std::size_t>(route.arcs[i])];
    const std::size_t pos = position_of(labels, legs[i].departure_s, r);
    if (pos < labels.size() && labels[pos].trip == r) labels.erase(labels.begin() + pos);
    ensure_active_on_arc(route.arcs[i], r);
  }
}

void ScheduleState::ensure_active_on_arc(ArcId a, TripId r) {
  auto& set = active_on_arc_[static_cast<std::size_t>(a)];
  if (std::find(set.begin(), set.end(), r) == set.end()) set.push_back(r);
}

void ScheduleState::enqueue(TripId r, int leg, double time) {
  pending_[slot(r, leg)] = time;
  queue_.push({time, r, leg, chosen_route(r).arcs[static_cast<std::size_t>(leg)]});
}

int ScheduleState::count_flow(ArcId a, double dep, TripId self) const {
  int flow = 0;
  // Inactive side: walk backward from the insertion position while traversals
  // still cover `dep`; under FIFO the first completed one ends the scan.
  const auto& labels = inactive_[static_cast<std::size_t>(a)];
  std::size_t pos = position_of(labels, dep, self);
  while (pos > 0) {
    const Label& l = labels[pos - 1];
    if (l.arrival_s <= dep + kTimeEps) break;
    ++flow;
    --pos;
  }
  // Active side: unsorted, scan everything.
  for (TripId other : active_on_arc_[static_cast<std::size_t>(a)]) {
    if (other == self) continue;
    const Route& route = chosen_route(other);
    const auto& legs = sched_.trips[static_cast<std::size_t>(other)].legs;
    for (std::size_t i = 0; i < route.arcs.size(); ++i) {
      if (route.arcs[i] != a) continue;
      if (label_before(legs[i].departure_s, other, dep, self) &&
          legs[i].arrival_s > dep + kTimeEps) {
        ++flow;
      }
    }
  }
  return flow;
}

void ScheduleState::apply(const ChangeRequest& change) {
  stats_ = {};
  pending_.clear();

  std::visit(
      [&](const auto& chg) {
        using T = std::decay_t<decltype(chg)>;
        auto& entry = sol_.trips[static_cast<std::size_t>(chg.trip)];
        const Trip& trip = inst_->trip(chg.trip);

        if constexpr (std::is_same_v<T, StaggerChange>) {
          if (!entry.present) throw UsageError("stagger: trip not in solution");
          if (chg.new_start_s < trip.earliest_departure_s - kTimeEps ||
              chg.new_start_s > trip.earliest_departure_s + trip.max_stagger_s + kTimeEps) {
            throw UsageError("stagger: start outside the trip window");
          }
          activate(chg.trip);
          entry.start_s = chg.new_start_s;
          enqueue(chg.trip, 0, chg.new_start_s);
        } else if constexpr (std::is_same_v<T, InsertChange>) {
          if (entry.present) throw UsageError("insert: trip already in solution");
          if (chg.route_index < 0 ||
              chg.route_index >= static_cast<int>(trip.routes.routes.size())) {
            throw UsageError("insert: route index out of range");
          }
          if (chg.start_s < trip.earliest_departure_s - kTimeEps ||
              chg.start_s > trip.earliest_departure_s + trip.max_stagger_s + kTimeEps) {
            throw UsageError("insert: start outside the trip window");
          }
          activate(chg.trip);  // nothing to unlink, but flags it in-flight
          entry = {chg.route_index, chg.start_s, true};
          const Route& route = chosen_route(chg.trip);
          sched_.trips[static_cast<std::size_t>(chg.trip)].legs.assign(route.arcs.size(),
                                                                       {kInf, kInf, 0.0, 0});
          for (ArcId a : route.arcs) ensure_active_on_arc(a, chg.trip);
          enqueue(chg.trip, 0, chg.start_s);
        } else {
          static_assert(std::is_same_v<T, RerouteChange>);
          if (!entry.present) throw UsageError("reroute: trip not in solution");
          if (chg.new_route_index < 0 ||
              chg.new_route_index >= static_cast<int>(trip.routes.routes.size())) {
            throw UsageError("reroute: route index out of range");
          }
          if (chg.start_s < trip.earliest_departure_s - kTimeEps ||
              chg.start_s > trip.earliest_departure_s + trip.max_stagger_s + kTimeEps) {
            throw UsageError("reroute: start outside the trip window");
          }
          // Trips that counted the rerouted trip on its old arcs lose that
          // flow; enqueue them before the old labels disappear.
          const Route& old_route = chosen_route(chg.trip);
          const auto old_legs = sched_.trips[static_cast<std::size_t>(chg.trip)].legs;
          activate(chg.trip);  // unlinks old labels
          std::vector<std::pair<TripId, ArcId>> affected;
          for (std::size_t i = 0; i < old_route.arcs.size(); ++i) {
            const ArcId a = old_route.arcs[i];
            for (TripId other : activation_range(inactive_[static_cast<std::size_t>(a)], chg.trip,
                                                 old_legs[i].departure_s, old_legs[i].arrival_s,
                                                 kInf, kInf)) {
              affected.emplace_back(other, a);
            }
          }
          entry.route_index = chg.new_route_index;
          entry.start_s = chg.start_s;
          const Route& route = chosen_route(chg.trip);
          sched_.trips[static_cast<std::size_t>(chg.trip)].legs.assign(route.arcs.size(),
                                                                       {kInf, kInf, 0.0, 0});
          for (ArcId a : route.arcs) ensure_active_on_arc(a, chg.trip);
          for (const auto& [other, arc] : affected) {
            activate(other);
            const Route& oroute = chosen_route(other);
            for (std::size_t i = 0; i < oroute.arcs.size(); ++i) {
              if (oroute.arcs[i] == arc) {
                enqueue(other, static_cast<int>(i),
                        sched_.trips[static_cast<std::size_t>(other)].legs[i].departure_s);
                break;
              }
            }
          }
          enqueue(chg.trip, 0, chg.start_s);
        }
      },
      change);

  const std::size_t route_len = chosen_route(std::visit([](const auto& c) { return c.trip; }, change)).arcs.size();
  budget_ = 50L * static_cast<long>(std::max<std::size_t>(route_len, 1)) *
            static_cast<long>(std::max<std::size_t>(inst_->trip_count(), 1));
  budget_ = std::max(budget_, 1000L);

  process_queue();
  finish_update();
}

void ScheduleState::process_queue() {
  double last_time = -kInf;
  while (!queue_.empty()) {
    const QueueLabel label = queue_.top();
    queue_.pop();

    const auto it = pending_.find(slot(label.trip, label.leg));
    if (it == pending_.end() || it->second != label.time) continue;  // superseded
    pending_.erase(it);

    if (++stats_.labels_processed > budget_) {
      throw BudgetError("schedule propagation exceeded its label budget (" +
                        std::to_string(budget_) + ")");
    }
    if (label.time < last_time) ++stats_.reorder_events;
    last_time = label.time;

    const Route& route = chosen_route(label.trip);
    const ArcId arc = route.arcs[static_cast<std::size_t>(label.leg)];
    auto& leg = sched_.trips[static_cast<std::size_t>(label.trip)].legs[static_cast<std::size_t>(label.leg)];
    const double dep_old = leg.departure_s;
    const double arr_old = leg.arrival_s;

    const double dep = label.time;
    const int flow = count_flow(arc, dep, label.trip);
    const double delay = inst_->arc_delay(arc, flow);
    const double arr = dep + inst_->arc_nominal_s(arc) + delay;
    leg = {dep, arr, delay, flow};

    // Wake inactive trips whose conflict status with this traversal changed.
    bool disorder = false;
    for (TripId other : activation_range(inactive_[static_cast<std::size_t>(arc)], label.trip,
                                         dep_old, arr_old, dep, arr)) {
      activate(other);
      const Route& oroute = chosen_route(other);
      for (std::size_t i = 0; i < oroute.arcs.size(); ++i) {
        if (oroute.arcs[i] == arc) {
          const double odep = sched_.trips[static_cast<std::size_t>(other)].legs[i].departure_s;
          enqueue(other, static_cast<int>(i), odep);
          if (odep < dep) disorder = true;
          break;
        }
      }
    }
    if (disorder) {
      // An earlier label just entered the queue; reprocess this leg after it.
      ++stats_.reorder_events;
      enqueue(label.trip, label.leg, dep);
    } else if (static_cast<std::size_t>(label.leg) + 1 < route.arcs.size()) {
      enqueue(label.trip, label.leg + 1, arr);
    }
  }
}

void ScheduleState::finish_update() {
  for (TripId r : active_trips_) {
    is_active_[static_cast<std::size_t>(r)] = 0;
    if (!sol_.trips[static_cast<std::size_t>(r)].present) continue;
    const Route& route = chosen_route(r);
    const auto& legs = sched_.trips[static_cast<std::size_t>(r)].legs;
    for (std::size_t i = 0; i < route.arcs.size(); ++i) {
      auto& labels = inactive_[static_cast<std::size_t>(route.arcs[i])];
      const std::size_t pos = position_of(labels, legs[i].departure_s, r);
      labels.insert(labels.begin() + pos, {legs[i].departure_s, legs[i].arrival_s, r});
    }
  }
  active_trips_.clear();
  for (auto& v : active_on_arc_) v.clear();
}

double ScheduleState::probe_travel_time_s(TripId r, int route_index, double start) const {
  const Route& route = inst_->route(r, route_index);
  double t = start;
  for (ArcId a : route.arcs) {
    const int flow = count_flow(a, t, r);
    t += inst_->arc_nominal_s(a) + inst_->arc_delay(a, flow);
  }
  return t - start;
}

void ScheduleState::remove(const std::vector<TripId>& trips) {
  for (TripId r : trips) {
    auto& entry = sol_.trips[static_cast<std::size_t>(r)];
    if (!entry.present) throw UsageError("remove: trip " + std::to_string(r) + " not in solution");
    entry.present = false;
  }
  repair();
}

void ScheduleState::check_index_consistency() const {
  std::vector<long> label_count(inst_->trip_count(), 0);
  for (ArcId a = 0; a < static_cast<ArcId>(inst_->network().arc_count()); ++a) {
    const auto& labels = inactive_[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i > 0 && !label_before(labels[i - 1].departure_s, labels[i - 1].trip,
                                 labels[i].departure_s, labels[i].trip)) {
        throw Error("index inconsistency: arc " + std::to_string(a) + " is not sorted");
      }
      ++label_count[static_cast<std::size_t>(labels[i].trip)];
    }
    if (!active_on_arc_[static_cast<std::size_t>(a)].empty()) {
      throw Error("index inconsistency: active set nonempty at rest");
    }
  }
  for (TripId r = 0; r < static_cast<TripId>(inst_->trip_count()); ++r) {
    const auto& entry = sol_.trips[static_cast<std::size_t>(r)];
    const long expected =
        entry.present ? static_cast<long>(chosen_route(r).arcs.size()) : 0L;
    if (label_count[static_cast<std::size_t>(r)] != expected) {
      throw Error("index inconsistency: trip " + std::to_string(r) + " owns " +
                  std::to_string(label_count[static_cast<std::size_t>(r)]) + " labels, expected " +
                  std::to_string(expected));
    }
  }
}

}  // namespace stagroute
