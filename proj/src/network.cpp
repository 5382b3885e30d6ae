#include "stagroute/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace stagroute {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Network::Network(std::vector<NodeId> nodes, std::vector<Arc> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i], static_cast<int>(i)).second) {
      throw UsageError("duplicate node id " + std::to_string(nodes_[i]));
    }
  }
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const Arc& a = arcs_[i];
    if (a.id != static_cast<ArcId>(i)) {
      throw UsageError("arc ids must be dense 0..|A|-1; got " + std::to_string(a.id) +
                       " at position " + std::to_string(i));
    }
    if (!has_node(a.tail) || !has_node(a.head)) {
      throw UsageError("arc " + std::to_string(a.id) + " references undeclared node");
    }
    if (a.tail == a.head) {
      throw UsageError("arc " + std::to_string(a.id) + " is a self loop");
    }
    if (!(a.length_m > 0.0) || !(a.nominal_s > 0.0)) {
      throw UsageError("arc " + std::to_string(a.id) + " needs positive length and nominal time");
    }
    out_[static_cast<std::size_t>(node_index(a.tail))].push_back(a.id);
    in_[static_cast<std::size_t>(node_index(a.head))].push_back(a.id);
  }
}

int Network::node_index(NodeId n) const {
  auto it = index_.find(n);
  if (it == index_.end()) throw UsageError("unknown node id " + std::to_string(n));
  return it->second;
}

std::span<const ArcId> Network::out_arcs(NodeId n) const {
  return out_[static_cast<std::size_t>(node_index(n))];
}

std::span<const ArcId> Network::in_arcs(NodeId n) const {
  return in_[static_cast<std::size_t>(node_index(n))];
}

namespace {

double arc_weight(const Arc& a, PathWeight w) {
  return w == PathWeight::Length ? a.length_m : a.nominal_s;
}

// Dijkstra over either arc orientation. `forward` relaxes out-arcs from the
// root, otherwise in-arcs (tree toward the root). Ties settle the smallest
// node id first; among equal-cost predecessors the smallest arc id wins.
PathTree dijkstra(const Network& net, NodeId root, PathWeight w, bool forward) {
  const std::size_t n = net.node_count();
  PathTree tree{std::vector<double>(n, kInf), std::vector<ArcId>(n, -1)};
  using Entry = std::pair<double, NodeId>;  // (dist, external node id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;

  const int root_idx = net.node_index(root);
  tree.dist[static_cast<std::size_t>(root_idx)] = 0.0;
  pq.emplace(0.0, root);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    const int ui = net.node_index(u);
    if (d > tree.dist[static_cast<std::size_t>(ui)]) continue;
    const auto arcs = forward ? net.out_arcs(u) : net.in_arcs(u);
    for (ArcId aid : arcs) {
      const Arc& a = net.arc(aid);
      const NodeId v = forward ? a.head : a.tail;
      const std::size_t vi = static_cast<std::size_t>(net.node_index(v));
      const double nd = d + arc_weight(a, w);
      if (nd < tree.dist[vi]) {
        tree.dist[vi] = nd;
        tree.parent[vi] = aid;
        pq.emplace(nd, v);
      } else if (nd == tree.dist[vi] && tree.parent[vi] >= 0 && aid < tree.parent[vi]) {
        tree.parent[vi] = aid;
      }
    }
  }
  return tree;
}

}  // namespace

PathTree shortest_path_tree(const Network& net, NodeId origin, PathWeight w) {
  return dijkstra(net, origin, w, true);
}

PathTree reverse_path_tree(const Network& net, NodeId dest, PathWeight w) {
  return dijkstra(net, dest, w, false);
}

std::vector<ArcId> shortest_path(const Network& net, NodeId origin, NodeId dest, PathWeight w) {
  if (origin == dest) {
    net.node_index(origin);  // validates existence
    return {};
  }
  const PathTree tree = shortest_path_tree(net, origin, w);
  const std::size_t di = static_cast<std::size_t>(net.node_index(dest));
  if (!(tree.dist[di] < kInf)) {
    throw NoPathError("no path from node " + std::to_string(origin) + " to node " +
                      std::to_string(dest));
  }
  std::vector<ArcId> path;
  for (NodeId v = dest; v != origin;) {
    const ArcId aid = tree.parent[static_cast<std::size_t>(net.node_index(v))];
    path.push_back(aid);
    v = net.arc(aid).tail;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_weight(const Network& net, std::span<const ArcId> arcs, PathWeight w) {
  double total = 0.0;
  for (ArcId a : arcs) total += arc_weight(net.arc(a), w);
  return total;
}

// ---------------------------------------------------------------------------
// Delay functions
// ---------------------------------------------------------------------------

void validate(const PolynomialDelay& p) {
  if (!(p.alpha > 0.0)) throw UsageError("polynomial delay: alpha must be > 0");
  if (!(p.beta >= 0.0)) throw UsageError("polynomial delay: beta must be >= 0");
  if (!(p.gamma >= 1.0)) throw UsageError("polynomial delay: gamma must be >= 1");
}

void validate(const PiecewiseTable& t) {
  if (t.slope_s_per_trip.empty() || t.slope_s_per_trip.size() != t.threshold_trips.size()) {
    throw UsageError("piecewise delay: needs K >= 1 matching slopes/thresholds");
  }
  double prev = -1.0;
  for (std::size_t k = 0; k < t.slope_s_per_trip.size(); ++k) {
    if (!(t.slope_s_per_trip[k] > 0.0)) throw UsageError("piecewise delay: slopes must be > 0");
    const double p = t.threshold_trips[k];
    if (!(p >= 0.0) || !(p > prev)) {
      throw UsageError("piecewise delay: thresholds must be >= 0 and strictly increasing");
    }
    prev = p;
  }
}

void validate(const DelaySpec& spec) {
  if (const auto* poly = std::get_if<PolynomialDelay>(&spec)) {
    validate(*poly);
  } else if (const auto* table = std::get_if<PiecewiseTable>(&spec)) {
    validate(*table);
  } else {
    const auto& r = std::get<PiecewiseRecipe>(spec);
    if (!(r.headway_s > 0.0)) throw UsageError("piecewise recipe: headway must be > 0");
    if (r.segments < 1) throw UsageError("piecewise recipe: segments must be >= 1");
  }
}

double PiecewiseTable::eval(double flow) const {
  double best = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < slope_s_per_trip.size(); ++k) {
    prefix += slope_s_per_trip[k] * (flow - threshold_trips[k]);
    best = std::max(best, prefix);
  }
  return best;
}

PiecewiseTable piecewise_table(const PiecewiseRecipe& recipe, double nominal_s) {
  const double p1 = std::ceil(nominal_s / recipe.headway_s);
  PiecewiseTable t;
  t.slope_s_per_trip.reserve(static_cast<std::size_t>(recipe.segments));
  t.threshold_trips.reserve(static_cast<std::size_t>(recipe.segments));
  for (int k = 1; k <= recipe.segments; ++k) {
    t.threshold_trips.push_back(p1 * k);
    t.slope_s_per_trip.push_back(0.5 * k * nominal_s / p1);
  }
  validate(t);
  return t;
}

double compute_delay(const DelaySpec& spec, double nominal_s, int flow) {
  if (const auto* poly = std::get_if<PolynomialDelay>(&spec)) {
    const double inv_tau = 1.0 / nominal_s;
    const double base = std::pow(poly->beta * inv_tau, poly->gamma);
    return nominal_s * poly->alpha *
           (std::pow((flow + poly->beta) * inv_tau, poly->gamma) - base);
  }
  if (const auto* table = std::get_if<PiecewiseTable>(&spec)) return table->eval(flow);
  return piecewise_table(std::get<PiecewiseRecipe>(spec), nominal_s).eval(flow);
}

double compute_travel_time(const DelaySpec& spec, double nominal_s, int flow) {
  return nominal_s + compute_delay(spec, nominal_s, flow);
}

DelayEvaluator::DelayEvaluator(const Network& net, const DelaySpec& spec) {
  validate(spec);
  if (const auto* poly = std::get_if<PolynomialDelay>(&spec)) {
    polynomial_ = true;
    beta_ = poly->beta;
    gamma_ = poly->gamma;
    poly_.reserve(net.arc_count());
    for (const Arc& a : net.arcs()) {
      const double inv_tau = 1.0 / a.nominal_s;
      poly_.push_back({a.nominal_s * poly->alpha, inv_tau, std::pow(poly->beta * inv_tau, poly->gamma)});
    }
  } else if (const auto* table = std::get_if<PiecewiseTable>(&spec)) {
    polynomial_ = false;
    tables_.assign(net.arc_count(), *table);
  } else {
    polynomial_ = false;
    const auto& recipe = std::get<PiecewiseRecipe>(spec);
    tables_.reserve(net.arc_count());
    for (const Arc& a : net.arcs()) tables_.push_back(piecewise_table(recipe, a.nominal_s));
  }
}

double DelayEvaluator::delay(ArcId a, int flow) const {
  if (polynomial_) {
    const PolyArc& p = poly_[static_cast<std::size_t>(a)];
    return p.scale * (std::pow((flow + beta_) * p.inv_tau, gamma_) - p.base);
  }
  return tables_[static_cast<std::size_t>(a)].eval(flow);
}

}  // namespace stagroute
