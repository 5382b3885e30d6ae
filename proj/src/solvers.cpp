#include "stagroute/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace stagroute {

void validate(const LnsParams& p) {
  if (!(p.pool_fraction > 0.0) || p.pool_fraction > 1.0) {
    throw UsageError("lns: pool fraction must be in (0, 1]");
  }
  if (!(p.sample_fraction > 0.0) || p.sample_fraction > 1.0) {
    throw UsageError("lns: sample fraction must be in (0, 1]");
  }
  if (p.max_cycles < 1) throw UsageError("lns: max cycles must be >= 1");
  if (!(p.alpha_min >= 1e-2) || !(p.alpha_max <= 1e3) || !(p.alpha_min <= p.alpha_max)) {
    throw UsageError("lns: alpha bounds must satisfy 1e-2 <= min <= max <= 1e3");
  }
  if (p.alpha_streak < 1) throw UsageError("lns: alpha streak must be >= 1");
}

std::vector<char> designate_controlled(const Instance& inst, const ControlScenario& scenario,
                                       std::uint64_t seed) {
  std::vector<char> controlled(inst.trip_count(), 1);
  if (scenario.control_fraction < 0.0) {
    for (std::size_t r = 0; r < inst.trip_count(); ++r) {
      controlled[r] = inst.trips()[r].controlled ? 1 : 0;
    }
    return controlled;
  }
  if (scenario.control_fraction >= 1.0) return controlled;
  for (std::size_t r = 0; r < inst.trip_count(); ++r) {
    Rng rng = substream(seed ^ 0x636f6e74726f6cULL, r);
    controlled[r] = rng.u01() < scenario.control_fraction ? 1 : 0;
  }
  return controlled;
}

Solution build_rduo(const Instance& inst) {
  ScheduleState state(inst);
  std::vector<TripId> order(inst.trip_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<TripId>(i);
  std::sort(order.begin(), order.end(), [&](TripId a, TripId b) {
    const double ea = inst.trip(a).earliest_departure_s;
    const double eb = inst.trip(b).earliest_departure_s;
    if (ea != eb) return ea < eb;
    return a < b;
  });

  for (TripId r : order) {
    const Trip& t = inst.trip(r);
    int best_route = 0;
    double best_time = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(t.routes.routes.size()); ++i) {
      const double travel = state.probe_travel_time_s(r, i, t.earliest_departure_s);
      if (travel < best_time) {
        best_time = travel;
        best_route = i;
      }
    }
    state.apply(InsertChange{r, best_route, t.earliest_departure_s});
  }
  state.repair();
  return state.solution();
}

Solution greedy_assignment(const Instance& inst, const LnsParams& params,
                           const ControlScenario& scenario, const Solution& base,
                           const std::vector<char>& controlled) {
  ScheduleState state(inst);
  Solution start = base;
  std::vector<TripId> to_insert;
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    if (controlled[static_cast<std::size_t>(r)]) {
      start.trips[static_cast<std::size_t>(r)].present = false;
      to_insert.push_back(r);
    }
  }
  state.reset(start);

  std::vector<double> delay_memory(inst.trip_count(), 0.0);
  MoveContext ctx{state,  params.alpha_initial, scenario.objective,
                  params.mode, params.start_grid_s, &delay_memory};
  insert_trips(ctx, to_insert, InsertOrder::Deadline);

  std::vector<TripId> late = check_feasibility(inst, state.solution(), state.schedule());
  std::erase_if(late, [&](TripId r) { return !controlled[static_cast<std::size_t>(r)]; });
  if (!late.empty()) local_search(ctx, late);
  return state.solution();
}

namespace {

struct PerTripCost {
  double congestion = 0.0;
  double detour = 0.0;
  double lateness = 0.0;
  double delay() const { return congestion + detour; }
};

PerTripCost trip_cost(const Instance& inst, const Solution& sol, const Schedule& sched, TripId r) {
  const Assignment& a = sol.trips[static_cast<std::size_t>(r)];
  PerTripCost c;
  if (!a.present) return c;
  const double arrival = sched.trips[static_cast<std::size_t>(r)].arrival_s();
  const double chosen_ff = inst.route(r, a.route_index).free_flow_s;
  c.detour = chosen_ff - inst.baseline_free_flow_s(r);
  c.congestion = arrival - a.start_s - chosen_ff;
  c.lateness = std::max(0.0, arrival - inst.trip(r).latest_arrival_s);
  return c;
}

enum class DestroyOperator { CostlyTrips, UntouchedTrips };

std::vector<TripId> select_removal_pool(const Instance& inst, const Solution& sol,
                                        const Schedule& sched, const std::vector<char>& controlled,
                                        double pool_fraction, double alpha, DestroyOperator op) {
  std::vector<TripId> ranked;
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    if (controlled[static_cast<std::size_t>(r)] && sol.trips[static_cast<std::size_t>(r)].present) {
      ranked.push_back(r);
    }
  }
  const std::size_t pool_size = static_cast<std::size_t>(
      std::ceil(pool_fraction * static_cast<double>(ranked.size())));

  if (op == DestroyOperator::CostlyTrips) {
    std::vector<double> cost(inst.trip_count(), 0.0);
    for (TripId r : ranked) {
      const PerTripCost c = trip_cost(inst, sol, sched, r);
      cost[static_cast<std::size_t>(r)] = c.delay() + alpha * c.lateness;
    }
    std::sort(ranked.begin(), ranked.end(), [&](TripId a, TripId b) {
      const double ca = cost[static_cast<std::size_t>(a)];
      const double cb = cost[static_cast<std::size_t>(b)];
      if (ca != cb) return ca > cb;
      return a < b;
    });
  } else {
    std::sort(ranked.begin(), ranked.end(), [&](TripId a, TripId b) {
      const bool sa = sol.trips[static_cast<std::size_t>(a)].route_index == 0;
      const bool sb = sol.trips[static_cast<std::size_t>(b)].route_index == 0;
      if (sa != sb) return sa;  // shortest-route trips first
      const double ta = sol.trips[static_cast<std::size_t>(a)].start_s;
      const double tb = sol.trips[static_cast<std::size_t>(b)].start_s;
      if (ta != tb) return ta < tb;
      return a < b;
    });
  }
  if (ranked.size() > pool_size) ranked.resize(pool_size);

  // All infeasible controlled trips join the pool.
  for (TripId r : check_feasibility(inst, sol, sched)) {
    if (!controlled[static_cast<std::size_t>(r)]) continue;
    if (std::find(ranked.begin(), ranked.end(), r) == ranked.end()) ranked.push_back(r);
  }
  return ranked;
}

}  // namespace

LnsOutput lns(const Instance& inst, const LnsParams& params, const ControlScenario& scenario,
              const Solution& rduo, const Solution& greedy, const std::vector<char>& controlled) {
  validate(params);
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  LnsOutput out;
  double alpha = std::clamp(params.alpha_initial, params.alpha_min, params.alpha_max);
  Rng rng(splitmix64(params.seed ^ 0x6c6e73ULL));

  ScheduleState state(inst);
  std::vector<double> delay_memory(inst.trip_count(), 0.0);
  MoveContext ctx{state, alpha, scenario.objective, params.mode, params.start_grid_s,
                  &delay_memory};

  auto cost_of = [&](const Solution& sol) {
    return evaluate(inst, sol, construct_schedule(inst, sol), alpha, scenario.objective);
  };

  Solution incumbent = cost_of(rduo).cost_s <= cost_of(greedy).cost_s ? rduo : greedy;
  CostBreakdown incumbent_cost = cost_of(incumbent);
  const auto log_incumbent = [&](const std::string& op) {
    out.log.push_back({elapsed_s(), incumbent_cost.cost_s, incumbent_cost.total_delay_s,
                       incumbent_cost.congestion_s, incumbent_cost.detour_s,
                       incumbent_cost.infeasibility_s, alpha, op});
  };
  log_incumbent("init");

  // Per-trip delay/infeasibility after the last local-search pass; the first
  // pass covers every controlled trip.
  std::vector<double> ls_delay(inst.trip_count(), 0.0);
  std::vector<double> ls_lateness(inst.trip_count(), 0.0);
  bool ls_ran_before = false;

  int feasible_streak = 0;
  int infeasible_streak = 0;
  const auto note_insert_outcome = [&](double infeasibility) {
    if (infeasibility <= 0.0) {
      ++feasible_streak;
      infeasible_streak = 0;
      if (feasible_streak >= params.alpha_streak) {
        alpha = std::clamp(alpha / 10.0, params.alpha_min, params.alpha_max);
        feasible_streak = 0;
      }
    } else {
      ++infeasible_streak;
      feasible_streak = 0;
      if (infeasible_streak >= params.alpha_streak) {
        alpha = std::clamp(alpha * 10.0, params.alpha_min, params.alpha_max);
        infeasible_streak = 0;
      }
    }
    ctx.alpha = alpha;
  };

  bool out_of_time = false;
  const auto time_up = [&] {
    if (!out_of_time && elapsed_s() > params.time_limit_s) out_of_time = true;
    return out_of_time;
  };

  bool improved = true;
  while (improved && !time_up()) {
    improved = false;
    for (const DestroyOperator op : {DestroyOperator::CostlyTrips, DestroyOperator::UntouchedTrips}) {
      Solution best_candidate = incumbent;
      CostBreakdown best_candidate_cost = incumbent_cost;
      bool restart = true;
      while (restart && !time_up()) {
        restart = false;
        Schedule incumbent_sched = construct_schedule(inst, incumbent);
        const std::vector<TripId> pool = select_removal_pool(
            inst, incumbent, incumbent_sched, controlled, params.pool_fraction, alpha, op);
        if (pool.empty()) break;
        const std::size_t sample_size = static_cast<std::size_t>(
            std::ceil(params.sample_fraction * static_cast<double>(pool.size())));

        for (int cycle = 0; cycle < params.max_cycles && !restart && !time_up(); ++cycle) {
          std::vector<TripId> sampled = pool;
          rng.shuffle(sampled);
          sampled.resize(std::min(sample_size, sampled.size()));
          std::sort(sampled.begin(), sampled.end());

          std::vector<InsertOrder> orders{InsertOrder::Earliest, InsertOrder::Deadline,
                                          InsertOrder::Delay};
          rng.shuffle(orders);
          for (const InsertOrder order : orders) {
            if (time_up()) break;
            state.reset(incumbent);
            remove_trips(ctx, sampled);
            insert_trips(ctx, sampled, order);
            const CostBreakdown cost = ctx.evaluate_current();
            note_insert_outcome(cost.infeasibility_s);

            // Alpha may have moved; compare both sides under the current one.
            incumbent_cost = cost_of(incumbent);
            const CostBreakdown candidate{cost.total_delay_s, cost.congestion_s, cost.detour_s,
                                          cost.infeasibility_s, alpha,
                                          cost.total_delay_s + alpha * cost.infeasibility_s};
            if (candidate.cost_s < incumbent_cost.cost_s) {
              incumbent = state.solution();
              incumbent_cost = candidate;
              improved = true;
              log_incumbent(op == DestroyOperator::CostlyTrips ? "costly" : "untouched");
              restart = true;  // rebuild the pool with the same operator
              break;
            }
            const double best_cand_now =
                best_candidate_cost.total_delay_s + alpha * best_candidate_cost.infeasibility_s;
            if (candidate.cost_s < best_cand_now) {
              best_candidate = state.solution();
              best_candidate_cost = candidate;
            }
          }
        }
      }
      if (time_up()) break;

      // Intensify the best candidate from this phase with local search.
      std::vector<TripId> scope_trips;
      {
        state.reset(best_candidate);
        for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
          if (!controlled[static_cast<std::size_t>(r)]) continue;
          if (!best_candidate.trips[static_cast<std::size_t>(r)].present) continue;
          if (!ls_ran_before) {
            scope_trips.push_back(r);
            continue;
          }
          const PerTripCost c = trip_cost(inst, best_candidate, state.schedule(), r);
          if (std::abs(c.delay() - ls_delay[static_cast<std::size_t>(r)]) > kTimeEps ||
              std::abs(c.lateness - ls_lateness[static_cast<std::size_t>(r)]) > kTimeEps) {
            scope_trips.push_back(r);
          }
        }
      }
      local_search(ctx, scope_trips);
      ls_ran_before = true;
      for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
        const PerTripCost c = trip_cost(inst, state.solution(), state.schedule(), r);
        ls_delay[static_cast<std::size_t>(r)] = c.delay();
        ls_lateness[static_cast<std::size_t>(r)] = c.lateness;
      }
      const CostBreakdown cost = ctx.evaluate_current();
      incumbent_cost = cost_of(incumbent);
      if (cost.cost_s < incumbent_cost.cost_s) {
        incumbent = state.solution();
        incumbent_cost = cost;
        improved = true;
        log_incumbent("local_search");
      }
    }
  }

  out.solution = incumbent;
  out.time_limit_hit = out_of_time;
  out.alpha_final = alpha;
  return out;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Rduo: return "rduo";
    case Variant::Greedy: return "greedy";
    case Variant::Stag: return "stag";
    case Variant::Bal: return "bal";
    case Variant::Integ: return "integ";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "rduo") return Variant::Rduo;
  if (s == "greedy") return Variant::Greedy;
  if (s == "stag") return Variant::Stag;
  if (s == "bal") return Variant::Bal;
  if (s == "integ") return Variant::Integ;
  throw UsageError("unknown variant '" + s + "' (rduo|greedy|stag|bal|integ)");
}

VariantMetrics run_variant(const Instance& inst, Variant variant, const LnsParams& params,
                           const ControlScenario& scenario) {
  validate(params);
  const auto t0 = std::chrono::steady_clock::now();

  VariantMetrics m;
  m.variant = variant;
  m.seed = params.seed;
  m.controlled = designate_controlled(inst, scenario, params.seed);

  m.rduo = build_rduo(inst);
  const Schedule rduo_sched = construct_schedule(inst, m.rduo);
  m.rduo_cost = evaluate(inst, m.rduo, rduo_sched, params.alpha_initial, scenario.objective);

  LnsParams run_params = params;
  switch (variant) {
    case Variant::Stag: run_params.mode = OperatorMode::Stag; break;
    case Variant::Bal: run_params.mode = OperatorMode::Bal; break;
    case Variant::Integ: run_params.mode = OperatorMode::Integ; break;
    default: break;
  }

  SolveResult& res = m.result;
  if (variant == Variant::Rduo) {
    res.solution = m.rduo;
  } else {
    // Staggering-only runs keep the reactive route choice, so seed route
    // indexes from the baseline before any insertion happens.
    const Solution greedy =
        greedy_assignment(inst, run_params, scenario, m.rduo, m.controlled);
    if (variant == Variant::Greedy) {
      res.solution = greedy;
    } else {
      LnsOutput lns_out = lns(inst, run_params, scenario, m.rduo, greedy, m.controlled);
      res.solution = lns_out.solution;
      res.log = std::move(lns_out.log);
      res.time_limit_hit = lns_out.time_limit_hit;
      res.alpha_final = lns_out.alpha_final;
    }
  }

  const Schedule sched = construct_schedule(inst, res.solution);
  res.cost = evaluate(inst, res.solution, sched, params.alpha_initial, scenario.objective);
  res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.feasible = check_feasibility(inst, res.solution, sched).empty();

  m.travel_delta_s.assign(inst.trip_count(), 0.0);
  m.arrival_delta_s.assign(inst.trip_count(), 0.0);
  m.stagger_s.assign(inst.trip_count(), 0.0);
  m.route_choice.assign(inst.trip_count(), 0);
  m.arc_delay_s.assign(inst.network().arc_count(), 0.0);
  m.arc_delay_rduo_s.assign(inst.network().arc_count(), 0.0);
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    const std::size_t i = static_cast<std::size_t>(r);
    const Assignment& a = res.solution.trips[i];
    if (!a.present) continue;
    const double arrival = sched.trips[i].arrival_s();
    const double rduo_arrival = rduo_sched.trips[i].arrival_s();
    const double rduo_start = m.rduo.trips[i].start_s;
    m.travel_delta_s[i] = (arrival - a.start_s) - (rduo_arrival - rduo_start);
    m.arrival_delta_s[i] = arrival - rduo_arrival;
    m.stagger_s[i] = a.start_s - inst.trip(r).earliest_departure_s;
    m.route_choice[i] = a.route_index;
    const Route& route = inst.route(r, a.route_index);
    const Route& rduo_route = inst.route(r, m.rduo.trips[i].route_index);
    for (std::size_t leg = 0; leg < route.arcs.size(); ++leg) {
      m.arc_delay_s[static_cast<std::size_t>(route.arcs[leg])] += sched.trips[i].legs[leg].delay_s;
    }
    for (std::size_t leg = 0; leg < rduo_route.arcs.size(); ++leg) {
      m.arc_delay_rduo_s[static_cast<std::size_t>(rduo_route.arcs[leg])] +=
          rduo_sched.trips[i].legs[leg].delay_s;
    }
  }
  return m;
}

Instance apply_rduo_deadline_policy(const Instance& inst, double factor) {
  const Solution rduo = build_rduo(inst);
  const Schedule sched = construct_schedule(inst, rduo);
  std::vector<Trip> trips = inst.trips();
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const double travel = sched.trips[i].arrival_s() - rduo.trips[i].start_s;
    const double ff0 = trips[i].routes.routes.front().free_flow_s;
    trips[i].latest_arrival_s =
        trips[i].earliest_departure_s + std::max(factor * travel, ff0);
  }
  return Instance::build(inst.network(), inst.delay_spec(), std::move(trips), inst.horizon_s());
}

}  // namespace stagroute
