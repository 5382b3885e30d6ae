#include <doctest.h>

#include <cmath>

#include "stagroute/incremental.hpp"
#include "test_helpers.hpp"

using namespace stagroute;
using namespace stagroute::testing;

namespace {

DelaySpec unit_slope() {
  PiecewiseTable t;
  t.slope_s_per_trip = {1.0};
  t.threshold_trips = {0.0};
  return t;
}

Instance two_trip_arc() {
  const Network net = make_one_arc(10.0, 100.0);
  std::vector<Trip> trips;
  trips.push_back(make_trip(net, 0, 0, 1, 0.0, 100.0, 50.0));
  trips.push_back(make_trip(net, 1, 0, 1, 5.0, 100.0, 50.0));
  return Instance::build(net, unit_slope(), std::move(trips), 200.0);
}

void check_same_schedule(const Instance& inst, const Schedule& got, const Schedule& want,
                         double tol = 1e-9) {
  REQUIRE(got.trips.size() == want.trips.size());
  for (std::size_t i = 0; i < got.trips.size(); ++i) {
    REQUIRE(got.trips[i].legs.size() == want.trips[i].legs.size());
    for (std::size_t leg = 0; leg < got.trips[i].legs.size(); ++leg) {
      CHECK(std::abs(got.trips[i].legs[leg].departure_s - want.trips[i].legs[leg].departure_s) <=
            tol);
      CHECK(std::abs(got.trips[i].legs[leg].arrival_s - want.trips[i].legs[leg].arrival_s) <= tol);
    }
  }
  (void)inst;
}

}  // namespace

TEST_CASE("activation range: no-op change activates nobody") {
  std::vector<Label> labels;
  for (int i = 0; i < 10; ++i) labels.push_back({10.0 * (i + 1), 10.0 * (i + 1) + 25.0, i + 1});
  CHECK(activation_range(labels, 99, 25.0, 45.0, 25.0, 45.0).empty());
}

TEST_CASE("activation range: delayed interval wakes exactly the flipped trips") {
  // Ten labels departing 10, 20, ..., 100 (trips r1..r10). The moving trip's
  // interval goes [25, 45) -> [65, 85): r3/r4 lose their conflict, r7/r8 gain
  // one, r5/r6 sit in both ranges and keep their status.
  std::vector<Label> labels;
  for (int i = 0; i < 10; ++i) labels.push_back({10.0 * (i + 1), 10.0 * (i + 1) + 4.0, i + 1});
  const auto woken = activation_range(labels, 99, 25.0, 45.0, 65.0, 85.0);
  CHECK(woken == std::vector<TripId>{3, 4, 7, 8});
}

TEST_CASE("activation range: insert and erase as half-open interval endpoints") {
  std::vector<Label> labels;
  for (int i = 0; i < 6; ++i) labels.push_back({10.0 * i, 10.0 * i + 4.0, i});
  const double inf = std::numeric_limits<double>::infinity();
  // Appearing interval [15, 35) covers the labels departing at 20 and 30.
  CHECK(activation_range(labels, 99, inf, inf, 15.0, 35.0) == std::vector<TripId>{2, 3});
  // Disappearing interval activates the same set.
  CHECK(activation_range(labels, 99, 15.0, 35.0, inf, inf) == std::vector<TripId>{2, 3});
}

TEST_CASE("activation range matches a brute-force conflict-status diff") {
  Rng rng(1234);
  for (int round = 0; round < 200; ++round) {
    std::vector<Label> labels;
    const int n = 3 + rng.below_int(12);
    double dep = 0.0;
    for (int i = 0; i < n; ++i) {
      dep += rng.uniform(0.5, 10.0);
      labels.push_back({dep, dep + rng.uniform(0.5, 20.0), i});
    }
    const TripId self = 1000;
    const double dep_old = rng.uniform(0.0, dep);
    const double arr_old = dep_old + rng.uniform(0.5, 25.0);
    const double dep_new = rng.uniform(0.0, dep);
    const double arr_new = dep_new + rng.uniform(0.5, 25.0);

    auto covers = [](double lo, double hi, double x) { return x >= lo && x < hi; };
    std::vector<TripId> expected;
    for (const Label& l : labels) {
      const bool before = covers(dep_old, arr_old, l.departure_s);
      const bool after = covers(dep_new, arr_new, l.departure_s);
      if (before != after) expected.push_back(l.trip);
    }
    CHECK(activation_range(labels, self, dep_old, arr_old, dep_new, arr_new) == expected);
  }
}

TEST_CASE("staggering a conflict-free trip shifts only that trip") {
  const Network net = make_grid(3, 3, 100.0, 5.0, 3, 20.0);
  std::vector<Trip> trips;
  trips.push_back(make_trip(net, 0, 0, 8, 0.0, 500.0, 100.0, 2, 0.9));
  trips.push_back(make_trip(net, 1, 2, 6, 300.0, 900.0, 100.0, 2, 0.9));  // far in the future
  const Instance inst = Instance::build(net, unit_slope(), std::move(trips), 1000.0);

  ScheduleState state(inst);
  Solution sol = Solution::empty(inst);
  sol.trips[0] = {0, 0.0, true};
  sol.trips[1] = {0, 300.0, true};
  state.reset(sol);
  const Schedule before = state.schedule();

  state.apply(StaggerChange{0, 40.0});
  state.check_index_consistency();
  const Schedule& after = state.schedule();
  for (std::size_t leg = 0; leg < after.trips[0].legs.size(); ++leg) {
    CHECK(after.trips[0].legs[leg].departure_s ==
          doctest::Approx(before.trips[0].legs[leg].departure_s + 40.0));
  }
  CHECK(after.trips[1].legs[0].departure_s == 300.0);
  CHECK(after.trips[1].arrival_s() == before.trips[1].arrival_s());
}

TEST_CASE("two-trip arc: delaying the follower clears its conflict") {
  const Instance inst = two_trip_arc();
  ScheduleState state(inst);
  Solution sol = Solution::empty(inst);
  sol.trips[0] = {0, 0.0, true};
  sol.trips[1] = {0, 5.0, true};
  state.reset(sol);
  CHECK(state.schedule().trips[1].arrival_s() == doctest::Approx(16.0));

  state.apply(StaggerChange{1, 10.0});
  state.check_index_consistency();
  CHECK(state.schedule().trips[1].legs[0].flow == 0);
  CHECK(state.schedule().trips[1].arrival_s() == doctest::Approx(20.0));
  check_same_schedule(inst, state.schedule(), construct_schedule(inst, state.solution()));
}

TEST_CASE("insert change matches from-scratch construction") {
  const Instance inst = two_trip_arc();
  ScheduleState state(inst);
  Solution sol = Solution::empty(inst);
  sol.trips[0] = {0, 0.0, true};
  state.reset(sol);

  state.apply(InsertChange{1, 0, 5.0});
  state.check_index_consistency();
  CHECK(state.solution().trips[1].present);
  check_same_schedule(inst, state.schedule(), construct_schedule(inst, state.solution()));
  CHECK(state.schedule().trips[1].arrival_s() == doctest::Approx(16.0));

  // The follower's arrival shows A's occupancy; A unchanged.
  CHECK(state.schedule().trips[0].arrival_s() == doctest::Approx(10.0));
}

TEST_CASE("reroute wakes trips left behind on the old route") {
  // Diamond: 0->1 (two parallel-ish routes via 1 and 2) -> 3.
  const Network net = Network({0, 1, 2, 3}, {{0, 0, 1, 100.0, 10.0},
                                             {1, 1, 3, 100.0, 10.0},
                                             {2, 0, 2, 150.0, 15.0},
                                             {3, 2, 3, 150.0, 15.0}});
  std::vector<Trip> trips;
  trips.push_back(make_trip(net, 0, 0, 3, 0.0, 500.0, 50.0, 2, 0.9));
  trips.push_back(make_trip(net, 1, 0, 3, 1.0, 500.0, 50.0, 2, 0.9));
  REQUIRE(trips[0].routes.routes.size() == 2);
  const Instance inst = Instance::build(net, unit_slope(), std::move(trips), 600.0);

  ScheduleState state(inst);
  Solution sol = Solution::empty(inst);
  sol.trips[0] = {0, 0.0, true};
  sol.trips[1] = {0, 1.0, true};
  state.reset(sol);
  CHECK(state.schedule().trips[1].legs[0].flow == 1);

  // Trip 0 moves to the long route; trip 1 no longer meets anyone.
  state.apply(RerouteChange{0, 1, 0.0});
  state.check_index_consistency();
  check_same_schedule(inst, state.schedule(), construct_schedule(inst, state.solution()));
  CHECK(state.schedule().trips[1].legs[0].flow == 0);
  CHECK(state.schedule().trips[0].arrival_s() == doctest::Approx(30.0));
}

TEST_CASE("window and presence violations are rejected") {
  const Instance inst = two_trip_arc();
  ScheduleState state(inst);
  Solution sol = Solution::empty(inst);
  sol.trips[0] = {0, 0.0, true};
  state.reset(sol);
  CHECK_THROWS_AS(state.apply(StaggerChange{1, 10.0}), UsageError);   // absent
  CHECK_THROWS_AS(state.apply(InsertChange{0, 0, 0.0}), UsageError);  // already there
  CHECK_THROWS_AS(state.apply(StaggerChange{0, 200.0}), UsageError);  // window
  CHECK_THROWS_AS(state.apply(InsertChange{1, 7, 5.0}), UsageError);  // bad route
}

TEST_CASE("repair is idempotent and clears an empty solution") {
  const Instance inst = two_trip_arc();
  ScheduleState state(inst);
  state.repair();
  state.repair();
  CHECK(state.solution().present_count() == 0);
  for (const auto& ts : state.schedule().trips) CHECK(ts.legs.empty());
}

TEST_CASE("random mutation sequences end up equal to from-scratch construction") {
  int sequences = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Network net = make_grid(4, 4, 100.0, 5.0, seed, 35.0);
    GenParams params;
    params.n_trips = 14;
    params.seed = seed;
    params.horizon_s = 150.0;
    params.k = 2;
    params.sigma_fraction = 0.5;
    const Instance inst = generate_synthetic(net, unit_slope(), params);

    ScheduleState state(inst);
    Solution shadow = Solution::empty(inst);
    Rng rng(seed * 31 + 7);
    // Start from a partially filled solution.
    for (std::size_t i = 0; i < inst.trip_count(); ++i) {
      if (rng.u01() < 0.7) {
        shadow.trips[i] = {0, inst.trips()[i].earliest_departure_s, true};
      }
    }
    state.reset(shadow);

    for (int step = 0; step < 25; ++step) {
      const TripId r = static_cast<TripId>(rng.below(inst.trip_count()));
      const Trip& t = inst.trip(r);
      auto& entry = shadow.trips[static_cast<std::size_t>(r)];
      const double start = t.earliest_departure_s + rng.u01() * t.max_stagger_s;
      const int route = rng.below_int(static_cast<int>(t.routes.routes.size()));
      if (!entry.present) {
        entry = {route, start, true};
        state.apply(InsertChange{r, route, start});
      } else {
        switch (rng.below(3)) {
          case 0:
            entry.start_s = start;
            state.apply(StaggerChange{r, start});
            break;
          case 1:
            entry.route_index = route;
            entry.start_s = start;
            state.apply(RerouteChange{r, route, start});
            break;
          default:
            entry.present = false;
            state.remove({r});
            break;
        }
      }
      state.check_index_consistency();
    }
    state.repair();
    check_same_schedule(inst, state.schedule(), construct_schedule(inst, shadow));
    ++sequences;
  }
  CHECK(sequences == 12);
}
