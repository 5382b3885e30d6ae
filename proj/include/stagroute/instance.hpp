#pragma once

#include <optional>
#include <vector>

#include "stagroute/network.hpp"
#include "stagroute/route_gen.hpp"

namespace stagroute {

struct Trip {
  TripId id = -1;
  NodeId origin = -1;
  NodeId dest = -1;
  double earliest_departure_s = 0.0;
  double latest_arrival_s = 0.0;
  double max_stagger_s = 0.0;
  RouteSet routes;
  bool controlled = true;
};

/// Immutable problem instance: network + delay model + trips with their
/// precomputed alternative routes.
class Instance {
 public:
  Instance() = default;
  static Instance build(Network net, DelaySpec spec, std::vector<Trip> trips, double horizon_s);

  const Network& network() const { return net_; }
  const DelaySpec& delay_spec() const { return spec_; }
  const std::vector<Trip>& trips() const { return trips_; }
  const Trip& trip(TripId r) const { return trips_[static_cast<std::size_t>(r)]; }
  std::size_t trip_count() const { return trips_.size(); }
  double horizon_s() const { return horizon_s_; }

  double arc_delay(ArcId a, int flow) const { return evaluator_.delay(a, flow); }
  double arc_nominal_s(ArcId a) const { return net_.arc(a).nominal_s; }

  // Smallest free-flow travel time among the trip's routes; the reference
  // against which total delay is measured.
  double baseline_free_flow_s(TripId r) const { return baseline_ff_[static_cast<std::size_t>(r)]; }

  const Route& route(TripId r, int route_index) const {
    return trips_[static_cast<std::size_t>(r)].routes.routes[static_cast<std::size_t>(route_index)];
  }

 private:
  Network net_;
  DelaySpec spec_;
  std::vector<Trip> trips_;
  double horizon_s_ = 0.0;
  DelayEvaluator evaluator_;
  std::vector<double> baseline_ff_;
};

enum class ArrivalProfile {
  // Independent uniform draws over [0, horizon): a Poisson process
  // conditioned on the trip count.
  UniformWindow,
  // Cumulative exponential interarrivals at a fixed rate.
  PoissonProcess,
};

enum class SigmaPolicy {
  // Fraction of the assigned (shortest-distance) route's nominal travel time.
  NominalFraction,
  // Fraction of the shortest route's free-flow travel time. Identical
  // arithmetic at generation time, kept as a named preset.
  ShortestFreeFlowFraction,
};

enum class DeadlinePolicy {
  // l_r = e_r + factor * free-flow of the assigned route.
  FreeFlowFactor,
  // l_r = e_r + factor * travel time in the reactive baseline (post-pass).
  RduoFactor,
};

struct GenParams {
  int n_trips = 1;
  double horizon_s = 3600.0;
  ArrivalProfile arrival = ArrivalProfile::UniformWindow;
  double arrival_rate_per_s = 0.0;  // PoissonProcess only
  SigmaPolicy sigma_policy = SigmaPolicy::ShortestFreeFlowFraction;
  double sigma_fraction = 0.2;
  DeadlinePolicy deadline_policy = DeadlinePolicy::FreeFlowFactor;
  double deadline_factor = 1.25;
  int k = 5;
  double theta = 0.6;
  double control_fraction = 1.0;
  std::uint64_t seed = 1;
};

// Deterministic synthetic instance: trip i draws all of its randomness from
// substream(seed, i), so earlier trips are unchanged when n_trips grows.
Instance generate_synthetic(const Network& net, const DelaySpec& spec, const GenParams& params);

}  // namespace stagroute
