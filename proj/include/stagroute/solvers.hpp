#pragma once

#include <optional>
#include <string>

#include "stagroute/moves.hpp"

namespace stagroute {

struct LnsParams {
  double pool_fraction = 0.4;    // x
  double sample_fraction = 0.1;  // y
  int max_cycles = 2;            // z
  double time_limit_s = 30.0;
  std::uint64_t seed = 1;
  OperatorMode mode = OperatorMode::Integ;
  double alpha_initial = 10.0;
  double alpha_min = 1e-2;
  double alpha_max = 1e3;
  int alpha_streak = 10;
  double start_grid_s = 0.0;

  // Heavier staggering-only benchmark preset.
  static LnsParams stag_benchmark() {
    LnsParams p;
    p.pool_fraction = 0.5;
    p.sample_fraction = 0.1;
    p.max_cycles = 25;
    p.mode = OperatorMode::Stag;
    return p;
  }
};

void validate(const LnsParams& p);

/// Mixed-traffic setting: uncontrolled (baseload) trips keep their reactive
/// baseline assignment and never enter any operator pool.
struct ControlScenario {
  // Probability that a trip is controlled; negative means "use the flags
  // stored in the instance".
  double control_fraction = 1.0;
  Scope objective = Scope::System;
};

struct LogRecord {
  double t_s = 0.0;
  double cost = 0.0;
  double total_delay = 0.0;
  double congestion = 0.0;
  double detour = 0.0;
  double infeasibility = 0.0;
  double alpha = 0.0;
  std::string op;
};

struct SolveResult {
  Solution solution;
  CostBreakdown cost;  // at alpha_initial, for cross-run comparability
  std::vector<LogRecord> log;
  double runtime_s = 0.0;
  bool time_limit_hit = false;
  double alpha_final = 0.0;
};

std::vector<char> designate_controlled(const Instance& inst, const ControlScenario& scenario,
                                       std::uint64_t seed);

// Reactive baseline: trips enter at their earliest departure, one by one in
// departure order, each picking the route that minimizes its own travel time
// against the traffic already present. Routes stay fixed afterwards.
Solution build_rduo(const Instance& inst);

// Deadline-ordered construction minimizing system cost per insertion; late
// trips get one local-search pass. `base` carries pre-assigned trips
// (baseload) and route seeds for staggering-only runs.
Solution greedy_assignment(const Instance& inst, const LnsParams& params,
                           const ControlScenario& scenario, const Solution& base,
                           const std::vector<char>& controlled);

struct LnsOutput {
  Solution solution;
  std::vector<LogRecord> log;
  bool time_limit_hit = false;
  double alpha_final = 0.0;
};

LnsOutput lns(const Instance& inst, const LnsParams& params, const ControlScenario& scenario,
              const Solution& rduo, const Solution& greedy, const std::vector<char>& controlled);

enum class Variant { Rduo, Greedy, Stag, Bal, Integ };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct VariantMetrics {
  Variant variant = Variant::Rduo;
  std::uint64_t seed = 0;
  SolveResult result;
  CostBreakdown rduo_cost;
  Solution rduo;
  bool feasible = false;
  // Per-trip structure relative to the reactive baseline.
  std::vector<double> travel_delta_s;
  std::vector<double> arrival_delta_s;
  std::vector<double> stagger_s;
  std::vector<int> route_choice;
  std::vector<char> controlled;
  // Per-arc congestion-delay totals (baseline and solved).
  std::vector<double> arc_delay_s;
  std::vector<double> arc_delay_rduo_s;
};

VariantMetrics run_variant(const Instance& inst, Variant variant, const LnsParams& params,
                           const ControlScenario& scenario);

// Rebuilds the instance with latest arrivals derived from the reactive
// baseline's travel times, scaled by `factor`.
Instance apply_rduo_deadline_policy(const Instance& inst, double factor);

}  // namespace stagroute
