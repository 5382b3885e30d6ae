#pragma once

#include <queue>
#include <unordered_map>
#include <variant>
#include <vector>

#include "stagroute/schedule.hpp"

namespace stagroute {

/// One trip's traversal of one arc, as seen by the per-arc indexes.
struct Label {
  double departure_s = 0.0;
  double arrival_s = 0.0;
  TripId trip = -1;
};

inline bool label_before(double dep_a, TripId trip_a, double dep_b, TripId trip_b) {
  if (dep_a != dep_b) return dep_a < dep_b;
  return trip_a < trip_b;
}

struct StaggerChange {
  TripId trip;
  double new_start_s;
};

struct InsertChange {
  TripId trip;
  int route_index;
  double start_s;
};

struct RerouteChange {
  TripId trip;
  int new_route_index;
  double start_s;
};

using ChangeRequest = std::variant<StaggerChange, InsertChange, RerouteChange>;

// Trips whose conflict status with the moving trip changes when its traversal
// interval on an arc moves from [dep_old, arr_old) to [dep_new, arr_new):
// the symmetric difference of the two covered position ranges in the sorted
// label list. Re-activating an unaffected trip is harmless, missing an
// affected one is not, so boundary ties activate conservatively.
std::vector<TripId> activation_range(const std::vector<Label>& sorted_labels, TripId self,
                                     double dep_old, double arr_old, double dep_new,
                                     double arr_new);

struct UpdateStats {
  long labels_processed = 0;
  long reorder_events = 0;  // queue-order disruptions that forced re-enqueues
};

/// Mutable schedule with per-arc sorted trip indexes. Localized changes
/// propagate through a label queue; arcs keep inactive labels sorted by
/// departure while labels of in-flight trips sit in an unsorted active set.
/// Flow counts against stale active labels can be off when FIFO breaks down;
/// repair() (a full rebuild) is mandatory at the end of every operator.
class ScheduleState {
 public:
  explicit ScheduleState(const Instance& inst);

  void reset(const Solution& sol);
  void repair();

  void apply(const ChangeRequest& change);
  void remove(const std::vector<TripId>& trips);  // mark absent + repair

  const Instance& instance() const { return *inst_; }
  const Solution& solution() const { return sol_; }
  const Schedule& schedule() const { return sched_; }
  double trip_arrival_s(TripId r) const;
  double trip_start_s(TripId r) const { return sol_.trips[static_cast<std::size_t>(r)].start_s; }

  const std::vector<Label>& arc_labels(ArcId a) const {
    return inactive_[static_cast<std::size_t>(a)];
  }

  // Travel time a trip would see on `route_index` starting at `start`, with
  // every other trip frozen at its current schedule. Does not mutate state.
  double probe_travel_time_s(TripId r, int route_index, double start) const;

  const UpdateStats& last_stats() const { return stats_; }

  // Test hook: partition + sortedness of the per-arc indexes.
  void check_index_consistency() const;

 private:
  struct QueueLabel {
    double time;
    TripId trip;
    int leg;
    ArcId arc;
  };
  struct QueueLater {
    bool operator()(const QueueLabel& a, const QueueLabel& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.trip != b.trip) return a.trip > b.trip;
      return a.arc > b.arc;
    }
  };

  const Route& chosen_route(TripId r) const {
    return inst_->route(r, sol_.trips[static_cast<std::size_t>(r)].route_index);
  }
  void rebuild_index();
  void activate(TripId r);
  void ensure_active_on_arc(ArcId a, TripId r);
  void enqueue(TripId r, int leg, double time);
  int count_flow(ArcId a, double dep, TripId self) const;
  void process_queue();
  void finish_update();

  const Instance* inst_ = nullptr;
  Solution sol_;
  Schedule sched_;
  std::vector<std::vector<Label>> inactive_;        // per arc, sorted by (dep, trip)
  std::vector<std::vector<TripId>> active_on_arc_;  // per arc, unsorted
  std::vector<char> is_active_;
  std::vector<TripId> active_trips_;
  std::unordered_map<std::uint64_t, double> pending_;  // (trip, leg) -> queued time
  std::priority_queue<QueueLabel, std::vector<QueueLabel>, QueueLater> queue_;
  UpdateStats stats_;
  long budget_ = 0;
};

}  // namespace stagroute
