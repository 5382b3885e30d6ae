#pragma once

#include <string>

#include <json.hpp>

#include "stagroute/instance.hpp"
#include "stagroute/schedule.hpp"

namespace stagroute {

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json delay_spec_to_json(const DelaySpec& spec);
DelaySpec delay_spec_from_json(const nlohmann::json& j);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

void save_instance(const Instance& inst, const std::string& path,
                   const std::string& config_hash = "");
Instance load_instance(const std::string& path);

nlohmann::json solution_to_json(const Instance& inst, const Solution& sol);
Solution solution_from_json(const Instance& inst, const nlohmann::json& j);

void save_solution(const Instance& inst, const Solution& sol, const std::string& path,
                   const std::string& config_hash = "");
Solution load_solution(const Instance& inst, const std::string& path);

// Per-leg schedule export: trip,arc,departure_s,arrival_s,flow,delay_s.
void write_schedule_csv(const Instance& inst, const Solution& sol, const Schedule& sched,
                        const std::string& path, const std::string& config_hash = "");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// FNV-1a over a canonical flag string; stamped into output files so runs can
// be traced back to their configuration.
std::string config_hash(const std::string& canonical_flags);

}  // namespace stagroute
