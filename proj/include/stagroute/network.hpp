#pragma once

#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "stagroute/common.hpp"

namespace stagroute {

struct Arc {
  ArcId id = -1;
  NodeId tail = -1;
  NodeId head = -1;
  double length_m = 0.0;
  double nominal_s = 0.0;
};

/// Immutable directed road network. Arc ids are dense 0..|A|-1; node ids are
/// arbitrary distinct integers.
class Network {
 public:
  Network() = default;
  Network(std::vector<NodeId> nodes, std::vector<Arc> arcs);

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(ArcId a) const { return arcs_[static_cast<std::size_t>(a)]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  bool has_node(NodeId n) const { return index_.count(n) > 0; }
  int node_index(NodeId n) const;
  NodeId node_at(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }

  std::span<const ArcId> out_arcs(NodeId n) const;
  std::span<const ArcId> in_arcs(NodeId n) const;

 private:
  std::vector<NodeId> nodes_;
  std::vector<Arc> arcs_;
  std::unordered_map<NodeId, int> index_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
};

enum class PathWeight { Length, NominalTime };

/// Shortest-path tree, indexed by dense node index. `parent` holds the arc
/// that reaches the node (forward trees) or leaves it (reverse trees); -1 at
/// the root and at unreachable nodes, where dist is +inf.
struct PathTree {
  std::vector<double> dist;
  std::vector<ArcId> parent;
};

PathTree shortest_path_tree(const Network& net, NodeId origin, PathWeight w);
PathTree reverse_path_tree(const Network& net, NodeId dest, PathWeight w);

// Minimum-weight arc path; deterministic under ties (smallest node id settles
// first, smallest arc id wins among equal-cost predecessors). origin == dest
// yields an empty path. Throws NoPathError if unreachable.
std::vector<ArcId> shortest_path(const Network& net, NodeId origin, NodeId dest, PathWeight w);

double path_weight(const Network& net, std::span<const ArcId> arcs, PathWeight w);

// ---------------------------------------------------------------------------
// Delay functions
// ---------------------------------------------------------------------------

struct PolynomialDelay {
  double alpha = 0.1;
  double beta = 35.0;
  double gamma = 3.0;
};

// Per-arc piecewise tables are derived from the arc's nominal time: the first
// threshold admits one trip per `headway_s` of nominal time, later thresholds
// are its multiples, and slopes grow in half-nominal steps.
struct PiecewiseRecipe {
  double headway_s = 15.0;
  int segments = 3;
};

struct PiecewiseTable {
  std::vector<double> slope_s_per_trip;   // mu_k > 0
  std::vector<double> threshold_trips;    // p_k >= 0, strictly increasing

  // max over prefixes k of sum_{k'<=k} mu_k' * (flow - p_k'), clamped at 0.
  double eval(double flow) const;
};

// An explicit PiecewiseTable applies uniformly to every arc regardless of
// nominal time; the recipe derives a table per arc.
using DelaySpec = std::variant<PolynomialDelay, PiecewiseRecipe, PiecewiseTable>;

void validate(const PolynomialDelay& p);
void validate(const PiecewiseTable& t);
void validate(const DelaySpec& spec);

PiecewiseTable piecewise_table(const PiecewiseRecipe& recipe, double nominal_s);

double compute_delay(const DelaySpec& spec, double nominal_s, int flow);
double compute_travel_time(const DelaySpec& spec, double nominal_s, int flow);

/// Precomputed per-arc delay evaluation for a fixed (network, spec) pair, so
/// the hot path is pure arithmetic.
class DelayEvaluator {
 public:
  DelayEvaluator() = default;
  DelayEvaluator(const Network& net, const DelaySpec& spec);

  double delay(ArcId a, int flow) const;

 private:
  struct PolyArc {
    double scale;    // tau * alpha
    double inv_tau;  // 1 / tau
    double base;     // (beta / tau) ^ gamma
  };
  bool polynomial_ = true;
  double beta_ = 0.0;
  double gamma_ = 1.0;
  std::vector<PolyArc> poly_;
  std::vector<PiecewiseTable> tables_;
};

}  // namespace stagroute
