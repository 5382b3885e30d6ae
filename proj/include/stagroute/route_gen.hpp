#pragma once

#include <vector>

#include "stagroute/network.hpp"

namespace stagroute {

struct Route {
  std::vector<ArcId> arcs;
  double length_m = 0.0;
  double free_flow_s = 0.0;
};

Route make_route(const Network& net, std::vector<ArcId> arcs);

/// Alternative routes for one OD pair: routes[0] is the shortest-distance
/// path, every pair overlaps by at most theta, and routes are sorted by
/// nondecreasing length. May hold fewer than k_requested routes.
struct RouteSet {
  std::vector<Route> routes;
  int k_requested = 1;
  double theta = 0.6;
};

// Shared-length ratio: sum of common arc lengths over the shorter route's
// length. Symmetric, in [0, 1], 1 for identical routes.
double similarity(const Network& net, const Route& p, const Route& q);

struct ViaCandidate {
  NodeId via = -1;
  Route route;
};

// All simple single-via candidate paths origin -> via -> dest, deduplicated
// and sorted by (length, via node id). Ranking metric is distance.
std::vector<ViaCandidate> svp_candidates(const Network& net, NodeId origin, NodeId dest);

// k shortest paths with limited overlap (single-via heuristic): seeds the
// result with the shortest path, then greedily accepts candidates in length
// order whose similarity to every accepted route stays within theta.
RouteSet kspwlo(const Network& net, NodeId origin, NodeId dest, int k, double theta);

}  // namespace stagroute
