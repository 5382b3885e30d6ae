#include "stagroute/route_gen.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_set>

namespace stagroute {

Route make_route(const Network& net, std::vector<ArcId> arcs) {
  Route r;
  r.arcs = std::move(arcs);
  for (std::size_t i = 0; i < r.arcs.size(); ++i) {
    const Arc& a = net.arc(r.arcs[i]);
    if (i > 0 && net.arc(r.arcs[i - 1]).head != a.tail) {
      throw UsageError("route arcs are not head-to-tail connected");
    }
    r.length_m += a.length_m;
    r.free_flow_s += a.nominal_s;
  }
  return r;
}

double similarity(const Network& net, const Route& p, const Route& q) {
  if (p.arcs.empty() || q.arcs.empty()) {
    throw UsageError("similarity requires nonempty routes");
  }
  std::unordered_set<ArcId> in_p(p.arcs.begin(), p.arcs.end());
  double shared = 0.0;
  for (ArcId a : q.arcs) {
    if (in_p.count(a)) shared += net.arc(a).length_m;
  }
  return shared / std::min(p.length_m, q.length_m);
}

namespace {

// Arc sequence from the forward tree: origin -> v.
bool tree_path_to(const Network& net, const PathTree& fwd, NodeId origin, NodeId v,
                  std::vector<ArcId>& out) {
  out.clear();
  if (v == origin) return true;
  std::size_t vi = static_cast<std::size_t>(net.node_index(v));
  if (!(fwd.dist[vi] < std::numeric_limits<double>::infinity())) return false;
  for (NodeId u = v; u != origin;) {
    const ArcId aid = fwd.parent[static_cast<std::size_t>(net.node_index(u))];
    out.push_back(aid);
    u = net.arc(aid).tail;
  }
  std::reverse(out.begin(), out.end());
  return true;
}

// Arc sequence from the reverse tree: v -> dest.
bool tree_path_from(const Network& net, const PathTree& rev, NodeId dest, NodeId v,
                    std::vector<ArcId>& out) {
  out.clear();
  if (v == dest) return true;
  std::size_t vi = static_cast<std::size_t>(net.node_index(v));
  if (!(rev.dist[vi] < std::numeric_limits<double>::infinity())) return false;
  for (NodeId u = v; u != dest;) {
    const ArcId aid = rev.parent[static_cast<std::size_t>(net.node_index(u))];
    out.push_back(aid);
    u = net.arc(aid).head;
  }
  return true;
}

bool is_simple(const Network& net, const std::vector<ArcId>& arcs) {
  if (arcs.empty()) return true;
  std::unordered_set<NodeId> seen;
  seen.insert(net.arc(arcs.front()).tail);
  for (ArcId a : arcs) {
    if (!seen.insert(net.arc(a).head).second) return false;
  }
  return true;
}

}  // namespace

std::vector<ViaCandidate> svp_candidates(const Network& net, NodeId origin, NodeId dest) {
  if (origin == dest) throw UsageError("route generation requires distinct origin and destination");
  const PathTree fwd = shortest_path_tree(net, origin, PathWeight::Length);
  const PathTree rev = reverse_path_tree(net, dest, PathWeight::Length);

  std::vector<ViaCandidate> candidates;
  std::map<std::vector<ArcId>, bool> seen;  // dedupe by arc sequence
  std::vector<ArcId> head, tail;
  for (NodeId via : net.nodes()) {
    if (!tree_path_to(net, fwd, origin, via, head)) continue;
    if (!tree_path_from(net, rev, dest, via, tail)) continue;
    std::vector<ArcId> arcs = head;
    arcs.insert(arcs.end(), tail.begin(), tail.end());
    if (arcs.empty() || !is_simple(net, arcs)) continue;
    if (!seen.emplace(arcs, true).second) continue;
    candidates.push_back({via, make_route(net, std::move(arcs))});
  }
  std::sort(candidates.begin(), candidates.end(), [](const ViaCandidate& a, const ViaCandidate& b) {
    if (a.route.length_m != b.route.length_m) return a.route.length_m < b.route.length_m;
    return a.via < b.via;
  });
  if (candidates.empty()) {
    throw NoPathError("no path from node " + std::to_string(origin) + " to node " +
                      std::to_string(dest));
  }
  return candidates;
}

RouteSet kspwlo(const Network& net, NodeId origin, NodeId dest, int k, double theta) {
  if (k < 1) throw UsageError("kspwlo: k must be >= 1");
  if (!(theta > 0.0) || theta > 1.0) throw UsageError("kspwlo: theta must be in (0, 1]");

  RouteSet result;
  result.k_requested = k;
  result.theta = theta;
  result.routes.push_back(make_route(net, shortest_path(net, origin, dest, PathWeight::Length)));

  const auto candidates = svp_candidates(net, origin, dest);
  for (const ViaCandidate& cand : candidates) {
    if (static_cast<int>(result.routes.size()) >= k) break;
    bool ok = true;
    for (const Route& accepted : result.routes) {
      if (cand.route.arcs == accepted.arcs) {
        ok = false;
        break;
      }
      if (similarity(net, cand.route, accepted) > theta + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) result.routes.push_back(cand.route);
  }
  return result;
}

}  // namespace stagroute
