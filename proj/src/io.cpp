#include "stagroute/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stagroute {

using nlohmann::json;

namespace {

// Pulls a field, rethrowing with a JSON-pointer-ish path on any mismatch.
template <class T>
T field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw IoError(path + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(path + "/" + key + ": " + e.what());
  }
}

}  // namespace

json network_to_json(const Network& net) {
  json arcs = json::array();
  for (const Arc& a : net.arcs()) {
    arcs.push_back({{"id", a.id},
                    {"tail", a.tail},
                    {"head", a.head},
                    {"length_m", a.length_m},
                    {"nominal_s", a.nominal_s}});
  }
  return {{"nodes", net.nodes()}, {"arcs", arcs}};
}

Network network_from_json(const json& j) {
  const auto nodes = field<std::vector<NodeId>>(j, "nodes", "/network");
  std::vector<Arc> arcs;
  const json jarcs = field<json>(j, "arcs", "/network");
  for (std::size_t i = 0; i < jarcs.size(); ++i) {
    const std::string path = "/network/arcs/" + std::to_string(i);
    const json& ja = jarcs.at(i);
    arcs.push_back({field<ArcId>(ja, "id", path), field<NodeId>(ja, "tail", path),
                    field<NodeId>(ja, "head", path), field<double>(ja, "length_m", path),
                    field<double>(ja, "nominal_s", path)});
  }
  try {
    return Network(std::move(nodes), std::move(arcs));
  } catch (const UsageError& e) {
    throw IoError(std::string("/network: ") + e.what());
  }
}

json delay_spec_to_json(const DelaySpec& spec) {
  if (const auto* poly = std::get_if<PolynomialDelay>(&spec)) {
    return {{"type", "polynomial"},
            {"alpha", poly->alpha},
            {"beta", poly->beta},
            {"gamma", poly->gamma}};
  }
  if (const auto* table = std::get_if<PiecewiseTable>(&spec)) {
    return {{"type", "piecewise_table"},
            {"slopes", table->slope_s_per_trip},
            {"thresholds", table->threshold_trips}};
  }
  const auto& r = std::get<PiecewiseRecipe>(spec);
  return {{"type", "piecewise"}, {"headway_s", r.headway_s}, {"segments", r.segments}};
}

DelaySpec delay_spec_from_json(const json& j) {
  const std::string type = field<std::string>(j, "type", "/delay");
  DelaySpec spec;
  if (type == "polynomial") {
    spec = PolynomialDelay{field<double>(j, "alpha", "/delay"), field<double>(j, "beta", "/delay"),
                           field<double>(j, "gamma", "/delay")};
  } else if (type == "piecewise") {
    spec = PiecewiseRecipe{field<double>(j, "headway_s", "/delay"),
                           field<int>(j, "segments", "/delay")};
  } else if (type == "piecewise_table") {
    PiecewiseTable t;
    t.slope_s_per_trip = field<std::vector<double>>(j, "slopes", "/delay");
    t.threshold_trips = field<std::vector<double>>(j, "thresholds", "/delay");
    spec = std::move(t);
  } else {
    throw IoError("/delay/type: expected 'polynomial', 'piecewise' or 'piecewise_table', got '" + type + "'");
  }
  try {
    validate(spec);
  } catch (const UsageError& e) {
    throw IoError(std::string("/delay: ") + e.what());
  }
  return spec;
}

json instance_to_json(const Instance& inst) {
  json trips = json::array();
  for (const Trip& t : inst.trips()) {
    json routes = json::array();
    for (const Route& r : t.routes.routes) routes.push_back({{"arcs", r.arcs}});
    trips.push_back({{"id", t.id},
                     {"origin", t.origin},
                     {"dest", t.dest},
                     {"earliest_departure_s", t.earliest_departure_s},
                     {"latest_arrival_s", t.latest_arrival_s},
                     {"max_stagger_s", t.max_stagger_s},
                     {"controlled", t.controlled},
                     {"routes", {{"k_requested", t.routes.k_requested},
                                 {"theta", t.routes.theta},
                                 {"routes", routes}}}});
  }
  return {{"horizon_s", inst.horizon_s()},
          {"network", network_to_json(inst.network())},
          {"delay", delay_spec_to_json(inst.delay_spec())},
          {"trips", trips}};
}

Instance instance_from_json(const json& j) {
  Network net = network_from_json(field<json>(j, "network", ""));
  DelaySpec spec = delay_spec_from_json(field<json>(j, "delay", ""));
  const double horizon = field<double>(j, "horizon_s", "");

  std::vector<Trip> trips;
  const json jtrips = field<json>(j, "trips", "");
  for (std::size_t i = 0; i < jtrips.size(); ++i) {
    const std::string path = "/trips/" + std::to_string(i);
    const json& jt = jtrips.at(i);
    Trip t;
    t.id = field<TripId>(jt, "id", path);
    t.origin = field<NodeId>(jt, "origin", path);
    t.dest = field<NodeId>(jt, "dest", path);
    t.earliest_departure_s = field<double>(jt, "earliest_departure_s", path);
    t.latest_arrival_s = field<double>(jt, "latest_arrival_s", path);
    t.max_stagger_s = field<double>(jt, "max_stagger_s", path);
    t.controlled = field<bool>(jt, "controlled", path);

    const json jset = field<json>(jt, "routes", path);
    t.routes.k_requested = field<int>(jset, "k_requested", path + "/routes");
    t.routes.theta = field<double>(jset, "theta", path + "/routes");
    const json jroutes = field<json>(jset, "routes", path + "/routes");
    for (std::size_t k = 0; k < jroutes.size(); ++k) {
      const std::string rpath = path + "/routes/routes/" + std::to_string(k);
      const auto arcs = field<std::vector<ArcId>>(jroutes.at(k), "arcs", rpath);
      for (ArcId a : arcs) {
        if (a < 0 || a >= static_cast<ArcId>(net.arc_count())) {
          throw IoError(rpath + ": unknown arc id " + std::to_string(a) + " (trip " +
                        std::to_string(t.id) + ")");
        }
      }
      try {
        t.routes.routes.push_back(make_route(net, arcs));
      } catch (const UsageError& e) {
        throw IoError(rpath + " (trip " + std::to_string(t.id) + "): " + e.what());
      }
    }
    trips.push_back(std::move(t));
  }
  try {
    return Instance::build(std::move(net), std::move(spec), std::move(trips), horizon);
  } catch (const UsageError& e) {
    throw IoError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("short write to " + path);
}

namespace {

json parse(const std::string& text, const std::string& path) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": not valid JSON");
  return j;
}

}  // namespace

void save_instance(const Instance& inst, const std::string& path, const std::string& hash) {
  json j = instance_to_json(inst);
  if (!hash.empty()) j["config_hash"] = hash;
  write_file(path, j.dump(2) + "\n");
}

Instance load_instance(const std::string& path) {
  return instance_from_json(parse(read_file(path), path));
}

json solution_to_json(const Instance& inst, const Solution& sol) {
  json assignments = json::array();
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    const Assignment& a = sol.trips[static_cast<std::size_t>(r)];
    if (!a.present) continue;
    assignments.push_back(
        {{"trip", r}, {"route_index", a.route_index}, {"start_time_s", a.start_s}});
  }
  return {{"assignments", assignments}};
}

Solution solution_from_json(const Instance& inst, const json& j) {
  Solution sol = Solution::empty(inst);
  const json jas = field<json>(j, "assignments", "");
  for (std::size_t i = 0; i < jas.size(); ++i) {
    const std::string path = "/assignments/" + std::to_string(i);
    const json& ja = jas.at(i);
    const TripId r = field<TripId>(ja, "trip", path);
    if (r < 0 || r >= static_cast<TripId>(inst.trip_count())) {
      throw IoError(path + ": unknown trip id " + std::to_string(r));
    }
    auto& entry = sol.trips[static_cast<std::size_t>(r)];
    entry.route_index = field<int>(ja, "route_index", path);
    entry.start_s = field<double>(ja, "start_time_s", path);
    entry.present = true;
    if (entry.route_index < 0 ||
        entry.route_index >= static_cast<int>(inst.trip(r).routes.routes.size())) {
      throw IoError(path + ": route index out of range for trip " + std::to_string(r));
    }
  }
  return sol;
}

void save_solution(const Instance& inst, const Solution& sol, const std::string& path,
                   const std::string& hash) {
  json j = solution_to_json(inst, sol);
  if (!hash.empty()) j["config_hash"] = hash;
  write_file(path, j.dump(2) + "\n");
}

Solution load_solution(const Instance& inst, const std::string& path) {
  return solution_from_json(inst, parse(read_file(path), path));
}

void write_schedule_csv(const Instance& inst, const Solution& sol, const Schedule& sched,
                        const std::string& path, const std::string& hash) {
  std::ostringstream out;
  out.precision(12);
  if (!hash.empty()) out << "# config_hash=" << hash << "\n";
  out << "trip,arc,departure_s,arrival_s,flow,delay_s\n";
  for (TripId r = 0; r < static_cast<TripId>(inst.trip_count()); ++r) {
    const Assignment& a = sol.trips[static_cast<std::size_t>(r)];
    if (!a.present) continue;
    const Route& route = inst.route(r, a.route_index);
    for (std::size_t leg = 0; leg < route.arcs.size(); ++leg) {
      const LegRecord& rec = sched.trips[static_cast<std::size_t>(r)].legs[leg];
      out << r << ',' << route.arcs[leg] << ',' << rec.departure_s << ',' << rec.arrival_s << ','
          << rec.flow << ',' << rec.delay_s << "\n";
    }
  }
  write_file(path, out.str());
}

std::string config_hash(const std::string& canonical_flags) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_flags) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stagroute
