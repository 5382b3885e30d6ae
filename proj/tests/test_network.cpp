#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stagroute/network.hpp"
#include "test_helpers.hpp"

using namespace stagroute;
using namespace stagroute::testing;

TEST_CASE("polynomial delay is exactly zero at zero flow") {
  const DelaySpec spec = PolynomialDelay{0.1, 35.0, 3.0};
  CHECK(compute_delay(spec, 60.0, 0) == 0.0);
  CHECK(compute_delay(spec, 17.3, 0) == 0.0);
  CHECK(compute_travel_time(spec, 60.0, 0) == 60.0);
}

TEST_CASE("polynomial delay matches integer-arithmetic reference") {
  // gamma = 3: tau*alpha*(((f+beta)/tau)^3 - (beta/tau)^3)
  //          = alpha*((f+beta)^3 - beta^3)/tau^2, evaluated in exact integers.
  const DelaySpec spec = PolynomialDelay{0.1, 35.0, 3.0};
  const double expected = 0.1 * (60.0 * 60.0 * 60.0 - 35.0 * 35.0 * 35.0) / (60.0 * 60.0);
  CHECK(expected == doctest::Approx(4.80902777777778).epsilon(1e-12));
  CHECK(compute_delay(spec, 60.0, 25) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(compute_travel_time(spec, 60.0, 25) == doctest::Approx(60.0 + expected).epsilon(1e-12));
}

TEST_CASE("piecewise table from the headway recipe") {
  const PiecewiseTable t = piecewise_table(PiecewiseRecipe{15.0, 3}, 60.0);
  REQUIRE(t.threshold_trips.size() == 3);
  CHECK(t.threshold_trips[0] == 4.0);
  CHECK(t.threshold_trips[1] == 8.0);
  CHECK(t.threshold_trips[2] == 12.0);
  CHECK(t.slope_s_per_trip[0] == 7.5);
  CHECK(t.slope_s_per_trip[1] == 15.0);
  CHECK(t.slope_s_per_trip[2] == 22.5);

  const DelaySpec spec = PiecewiseRecipe{15.0, 3};
  CHECK(compute_delay(spec, 60.0, 4) == 0.0);
  CHECK(compute_delay(spec, 60.0, 0) == 0.0);
  // flow 6: only the first segment is positive, 7.5 * (6 - 4).
  CHECK(compute_travel_time(spec, 60.0, 6) == doctest::Approx(75.0).epsilon(1e-12));
}

TEST_CASE("delay spec validation") {
  CHECK_THROWS_AS(validate(DelaySpec{PolynomialDelay{0.0, 35.0, 3.0}}), UsageError);
  CHECK_THROWS_AS(validate(DelaySpec{PolynomialDelay{0.1, -1.0, 3.0}}), UsageError);
  CHECK_THROWS_AS(validate(DelaySpec{PolynomialDelay{0.1, 35.0, 0.5}}), UsageError);
  CHECK_THROWS_AS(validate(DelaySpec{PiecewiseRecipe{0.0, 3}}), UsageError);
  CHECK_THROWS_AS(validate(DelaySpec{PiecewiseRecipe{15.0, 0}}), UsageError);
  PiecewiseTable bad;
  bad.slope_s_per_trip = {1.0, 1.0};
  bad.threshold_trips = {2.0, 2.0};  // not strictly increasing
  CHECK_THROWS_AS(validate(DelaySpec{bad}), UsageError);
}

TEST_CASE("delay properties: monotone, discretely convex, zero at zero") {
  Rng rng(7);
  for (int round = 0; round < 500; ++round) {
    DelaySpec spec;
    if (round % 2 == 0) {
      spec = PolynomialDelay{rng.uniform(0.01, 2.0), rng.uniform(0.0, 100.0),
                             rng.uniform(1.0, 4.0)};
    } else {
      PiecewiseTable t;
      const int k = 1 + rng.below_int(4);
      double threshold = rng.uniform(0.0, 5.0);
      for (int i = 0; i < k; ++i) {
        t.slope_s_per_trip.push_back(rng.uniform(0.1, 30.0));
        t.threshold_trips.push_back(threshold);
        threshold += rng.uniform(0.5, 6.0);
      }
      spec = std::move(t);
    }
    const double tau = rng.uniform(5.0, 600.0);
    CHECK(compute_delay(spec, tau, 0) == 0.0);
    double prev = 0.0;
    double prev_diff = -1.0;
    for (int f = 0; f + 2 < 34; ++f) {
      const double d1 = compute_delay(spec, tau, f + 1);
      const double d0 = compute_delay(spec, tau, f);
      CHECK(d1 >= d0 - 1e-9);
      const double diff = d1 - d0;
      if (f > 0) CHECK(diff >= prev_diff - 1e-9);
      prev_diff = diff;
      prev = d0;
      (void)prev;
    }
  }
}

TEST_CASE("shortest path basics") {
  const Network net = make_grid(2, 2);
  CHECK(shortest_path(net, 1, 1, PathWeight::Length).empty());

  const Network two = make_one_arc(10.0, 100.0);
  const auto path = shortest_path(two, 0, 1, PathWeight::Length);
  REQUIRE(path.size() == 1);
  CHECK(path[0] == 0);
  CHECK_THROWS_AS(shortest_path(two, 1, 0, PathWeight::Length), NoPathError);
}

namespace {

// Exhaustive simple-path minimum via DFS; the independent reference for
// Dijkstra on small graphs.
void dfs_min(const Network& net, NodeId at, NodeId dest, std::vector<char>& visited,
             double weight, PathWeight w, double& best) {
  if (at == dest) {
    best = std::min(best, weight);
    return;
  }
  for (ArcId aid : net.out_arcs(at)) {
    const Arc& a = net.arc(aid);
    if (visited[static_cast<std::size_t>(net.node_index(a.head))]) continue;
    visited[static_cast<std::size_t>(net.node_index(a.head))] = 1;
    dfs_min(net, a.head, dest, visited, weight + (w == PathWeight::Length ? a.length_m : a.nominal_s),
            w, best);
    visited[static_cast<std::size_t>(net.node_index(a.head))] = 0;
  }
}

double brute_force_shortest(const Network& net, NodeId origin, NodeId dest, PathWeight w) {
  std::vector<char> visited(net.node_count(), 0);
  visited[static_cast<std::size_t>(net.node_index(origin))] = 1;
  double best = std::numeric_limits<double>::infinity();
  dfs_min(net, origin, dest, visited, 0.0, w, best);
  return best;
}

}  // namespace

TEST_CASE("shortest path matches exhaustive enumeration on random 5x5 grids") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Network net = make_grid(5, 5, 100.0, 5.0, seed, 120.0);
    Rng rng(seed * 1000 + 1);
    for (int q = 0; q < 6; ++q) {
      const NodeId o = static_cast<NodeId>(rng.below(net.node_count()));
      const NodeId d = static_cast<NodeId>(rng.below(net.node_count()));
      if (o == d) continue;
      const auto path = shortest_path(net, o, d, PathWeight::Length);
      const double got = path_weight(net, path, PathWeight::Length);
      const double want = brute_force_shortest(net, o, d, PathWeight::Length);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("network construction validation") {
  CHECK_THROWS_AS(Network({0, 1}, {{0, 0, 0, 100.0, 10.0}}), UsageError);   // self loop
  CHECK_THROWS_AS(Network({0, 1}, {{0, 0, 2, 100.0, 10.0}}), UsageError);   // missing node
  CHECK_THROWS_AS(Network({0, 1}, {{1, 0, 1, 100.0, 10.0}}), UsageError);   // non-dense id
  CHECK_THROWS_AS(Network({0, 1}, {{0, 0, 1, 0.0, 10.0}}), UsageError);     // zero length
  CHECK_THROWS_AS(Network({0, 0}, {}), UsageError);                         // dup node
}
