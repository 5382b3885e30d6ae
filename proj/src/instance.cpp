#include "stagroute/instance.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <unordered_set>

namespace stagroute {

Instance Instance::build(Network net, DelaySpec spec, std::vector<Trip> trips, double horizon_s) {
  validate(spec);
  Instance inst;
  inst.net_ = std::move(net);
  inst.spec_ = std::move(spec);
  inst.trips_ = std::move(trips);
  inst.horizon_s_ = horizon_s;
  inst.evaluator_ = DelayEvaluator(inst.net_, inst.spec_);

  inst.baseline_ff_.reserve(inst.trips_.size());
  for (std::size_t i = 0; i < inst.trips_.size(); ++i) {
    const Trip& t = inst.trips_[i];
    const std::string tag = "trip " + std::to_string(t.id);
    if (t.id != static_cast<TripId>(i)) {
      throw UsageError(tag + ": trip ids must be dense 0..|R|-1");
    }
    if (!inst.net_.has_node(t.origin) || !inst.net_.has_node(t.dest)) {
      throw UsageError(tag + ": origin or destination not in network");
    }
    if (t.routes.routes.empty()) throw UsageError(tag + ": needs at least one route");
    if (!(t.max_stagger_s >= 0.0)) throw UsageError(tag + ": max stagger must be >= 0");

    double min_ff = std::numeric_limits<double>::infinity();
    for (const Route& r : t.routes.routes) {
      if (r.arcs.empty()) throw UsageError(tag + ": empty route");
      const Route rebuilt = make_route(inst.net_, r.arcs);  // connectivity + sums
      if (std::abs(rebuilt.length_m - r.length_m) > 1e-6 ||
          std::abs(rebuilt.free_flow_s - r.free_flow_s) > 1e-6) {
        throw UsageError(tag + ": route length/free-flow disagrees with arc data");
      }
      std::unordered_set<ArcId> uniq(r.arcs.begin(), r.arcs.end());
      if (uniq.size() != r.arcs.size()) throw UsageError(tag + ": route repeats an arc");
      if (inst.net_.arc(r.arcs.front()).tail != t.origin ||
          inst.net_.arc(r.arcs.back()).head != t.dest) {
        throw UsageError(tag + ": route endpoints disagree with trip origin/destination");
      }
      min_ff = std::min(min_ff, r.free_flow_s);
    }
    if (t.earliest_departure_s + t.routes.routes.front().free_flow_s >
        t.latest_arrival_s + kTimeEps) {
      throw UsageError(tag + ": shortest route infeasible even under free flow");
    }
    inst.baseline_ff_.push_back(min_ff);
  }
  return inst;
}

namespace {

constexpr int kOdRetries = 64;

}  // namespace

Instance generate_synthetic(const Network& net, const DelaySpec& spec, const GenParams& params) {
  if (params.n_trips < 1) throw UsageError("generate: n_trips must be >= 1");
  if (!(params.horizon_s > 0.0)) throw UsageError("generate: horizon must be > 0");
  if (!(params.sigma_fraction >= 0.0)) throw UsageError("generate: sigma fraction must be >= 0");
  if (!(params.deadline_factor >= 1.0)) throw UsageError("generate: deadline factor must be >= 1");
  if (params.arrival == ArrivalProfile::PoissonProcess && !(params.arrival_rate_per_s > 0.0)) {
    throw UsageError("generate: poisson arrival profile needs a positive rate");
  }

  const auto& nodes = net.nodes();
  if (nodes.size() < 2) throw UsageError("generate: network needs at least two nodes");

  std::vector<Trip> trips;
  trips.reserve(static_cast<std::size_t>(params.n_trips));
  double poisson_clock = 0.0;
  for (int i = 0; i < params.n_trips; ++i) {
    Rng rng = substream(params.seed, static_cast<std::uint64_t>(i));

    Trip t;
    t.id = i;
    bool found = false;
    for (int attempt = 0; attempt < kOdRetries && !found; ++attempt) {
      const NodeId o = nodes[rng.below(nodes.size())];
      const NodeId d = nodes[rng.below(nodes.size())];
      if (o == d) continue;
      try {
        t.routes = kspwlo(net, o, d, params.k, params.theta);
      } catch (const NoPathError&) {
        continue;
      }
      t.origin = o;
      t.dest = d;
      found = true;
    }
    if (!found) {
      throw UsageError("generate: could not sample a connected OD pair after " +
                       std::to_string(kOdRetries) + " attempts (trip " + std::to_string(i) + ")");
    }

    switch (params.arrival) {
      case ArrivalProfile::UniformWindow:
        t.earliest_departure_s = rng.u01() * params.horizon_s;
        break;
      case ArrivalProfile::PoissonProcess:
        poisson_clock += rng.exponential(params.arrival_rate_per_s);
        t.earliest_departure_s = poisson_clock;
        break;
    }

    const double ff0 = t.routes.routes.front().free_flow_s;
    t.max_stagger_s = params.sigma_fraction * ff0;
    t.latest_arrival_s = t.earliest_departure_s + params.deadline_factor * ff0;
    t.controlled = params.control_fraction >= 1.0 || rng.u01() < params.control_fraction;
    trips.push_back(std::move(t));
  }
  return Instance::build(net, spec, std::move(trips), params.horizon_s);
}

}  // namespace stagroute
