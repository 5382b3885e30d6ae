#include <doctest.h>

#include <algorithm>

#include "stagroute/route_gen.hpp"
#include "test_helpers.hpp"

using namespace stagroute;
using namespace stagroute::testing;

namespace {

// Fan network: 0 -> 1 via arc a (100 m), then 1 -> 2 via b (200 m) and
// 1 -> 3 via c (300 m).
Network fan_network() {
  return Network({0, 1, 2, 3}, {{0, 0, 1, 100.0, 20.0},
                                {1, 1, 2, 200.0, 40.0},
                                {2, 1, 3, 300.0, 60.0}});
}

}  // namespace

TEST_CASE("similarity identities") {
  const Network net = fan_network();
  const Route p = make_route(net, {0, 1});  // 300 m total
  const Route q = make_route(net, {0, 2});  // 400 m total
  CHECK(similarity(net, p, p) == doctest::Approx(1.0));
  CHECK(similarity(net, p, q) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(similarity(net, q, p) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const Route b_only = make_route(net, {1});
  const Route c_only = make_route(net, {2});
  CHECK(similarity(net, b_only, c_only) == 0.0);
  CHECK_THROWS_AS(similarity(net, Route{}, p), UsageError);
}

TEST_CASE("kspwlo k=1 returns exactly the shortest path") {
  const Network net = make_grid(4, 4, 100.0, 5.0, 3, 80.0);
  const RouteSet set = kspwlo(net, 0, 15, 1, 0.6);
  REQUIRE(set.routes.size() == 1);
  CHECK(set.routes[0].arcs == shortest_path(net, 0, 15, PathWeight::Length));
}

TEST_CASE("kspwlo parameter validation") {
  const Network net = make_grid(3, 3);
  CHECK_THROWS_AS(kspwlo(net, 0, 8, 0, 0.6), UsageError);
  CHECK_THROWS_AS(kspwlo(net, 0, 8, 3, 0.0), UsageError);
  CHECK_THROWS_AS(kspwlo(net, 0, 8, 3, 1.5), UsageError);
  const Network two = make_one_arc();
  CHECK_THROWS_AS(kspwlo(two, 1, 0, 1, 0.6), NoPathError);
}

TEST_CASE("kspwlo theta=1 keeps the k shortest single-via paths") {
  const Network net = make_grid(4, 4, 100.0, 5.0, 5, 60.0);
  const RouteSet set = kspwlo(net, 0, 15, 4, 1.0);
  const auto candidates = svp_candidates(net, 0, 15);
  REQUIRE(set.routes.size() == 4);
  // With the overlap constraint vacuous the greedy keeps the length order.
  for (std::size_t i = 0; i + 1 < set.routes.size(); ++i) {
    CHECK(set.routes[i].length_m <= set.routes[i + 1].length_m + 1e-9);
  }
  CHECK(set.routes[1].arcs == candidates[1].route.arcs);
}

TEST_CASE("kspwlo on a 6x6 grid satisfies the pairwise constraint") {
  const Network net = make_grid(6, 6, 100.0, 5.0, 9, 50.0);
  const RouteSet set = kspwlo(net, 0, 35, 3, 0.6);
  CHECK(set.routes.front().arcs == shortest_path(net, 0, 35, PathWeight::Length));
  for (std::size_t i = 0; i < set.routes.size(); ++i) {
    for (std::size_t j = i + 1; j < set.routes.size(); ++j) {
      CHECK(similarity(net, set.routes[i], set.routes[j]) <= 0.6 + 1e-9);
    }
  }
}

TEST_CASE("kspwlo may return fewer than k routes and reports the count") {
  const Network two = make_one_arc();
  const RouteSet set = kspwlo(two, 0, 1, 5, 0.6);
  CHECK(set.k_requested == 5);
  REQUIRE(set.routes.size() == 1);
  CHECK(set.routes[0].arcs == std::vector<ArcId>{0});
}

namespace {

// Greedy-certificate replay: walking the sorted candidate list must
// reproduce the returned set, and every candidate skipped while the set was
// still short must either duplicate an accepted route or violate theta
// against the accepted prefix at that moment.
void replay_certificate(const Network& net, NodeId origin, NodeId dest, int k, double theta) {
  const RouteSet set = kspwlo(net, origin, dest, k, theta);
  const auto candidates = svp_candidates(net, origin, dest);

  std::vector<Route> accepted;
  accepted.push_back(make_route(net, shortest_path(net, origin, dest, PathWeight::Length)));
  for (const ViaCandidate& cand : candidates) {
    if (static_cast<int>(accepted.size()) >= k) break;
    bool duplicate = false;
    bool violates = false;
    for (const Route& acc : accepted) {
      if (cand.route.arcs == acc.arcs) duplicate = true;
      if (similarity(net, cand.route, acc) > theta + 1e-12) violates = true;
    }
    if (!duplicate && !violates) accepted.push_back(cand.route);
    if (duplicate || violates) continue;
  }
  REQUIRE(accepted.size() == set.routes.size());
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    CHECK(accepted[i].arcs == set.routes[i].arcs);
  }
}

}  // namespace

TEST_CASE("kspwlo greedy certificate replays on random networks") {
  for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
    const Network grid = make_grid(5, 5, 100.0, 5.0, seed, 90.0);
    replay_certificate(grid, 0, 24, 3, 0.6);
    replay_certificate(grid, 4, 20, 5, 0.9);
    const Network ring = make_ring(9, 100.0, 5.0, seed, 30.0);
    replay_certificate(ring, 0, 4, 3, 0.6);
  }
}
