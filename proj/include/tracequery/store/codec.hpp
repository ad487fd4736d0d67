#pragma once

// JSON encodings of simulator and vocabulary types, shared by the library
// file format and the HTTP API. Decoders throw ValidationError naming the
// offending field.

#include <json.hpp>
#include <string>

#include "tracequery/abstraction/highway.hpp"
#include "tracequery/abstraction/simulator.hpp"
#include "tracequery/error.hpp"

namespace tracequery::store {

using json = nlohmann::json;
namespace abs = tracequery::abstraction;

namespace detail {

inline const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) throw ValidationError(where + name, "missing field");
  return j.at(name);
}

template <class T>
T get(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + name, "wrong type");
  }
}

}  // namespace detail

inline json to_json(const abs::SimConfig& c) {
  return json{{"lanes", c.lanes},
              {"steps", c.steps},
              {"npc_count", c.npc_count},
              {"agent_speed", c.agent_speed},
              {"npc_speed_min", c.npc_speed_min},
              {"npc_speed_max", c.npc_speed_max},
              {"min_speed", c.min_speed},
              {"max_speed", c.max_speed},
              {"speed_delta", c.speed_delta},
              {"proximity", c.proximity},
              {"adjacent_proximity", c.adjacent_proximity},
              {"npc_lane_change_prob", c.npc_lane_change_prob},
              {"agent_lane_change_prob", c.agent_lane_change_prob},
              {"spawn_range", c.spawn_range},
              {"trigger", c.trigger}};
}

// Missing keys keep their defaults, so partial config files are accepted.
inline abs::SimConfig sim_config_from_json(const json& j, const std::string& where = "config.") {
  if (!j.is_object()) throw ValidationError(where.substr(0, where.size() - 1), "expected an object");
  abs::SimConfig c;
  auto opt = [&](const char* name, auto& slot) {
    if (j.contains(name)) slot = detail::get<std::decay_t<decltype(slot)>>(j, name, where);
  };
  opt("lanes", c.lanes);
  opt("steps", c.steps);
  opt("npc_count", c.npc_count);
  opt("agent_speed", c.agent_speed);
  opt("npc_speed_min", c.npc_speed_min);
  opt("npc_speed_max", c.npc_speed_max);
  opt("min_speed", c.min_speed);
  opt("max_speed", c.max_speed);
  opt("speed_delta", c.speed_delta);
  opt("proximity", c.proximity);
  opt("adjacent_proximity", c.adjacent_proximity);
  opt("npc_lane_change_prob", c.npc_lane_change_prob);
  opt("agent_lane_change_prob", c.agent_lane_change_prob);
  opt("spawn_range", c.spawn_range);
  opt("trigger", c.trigger);
  return c;
}

inline json to_json(const abs::RawState& s) {
  json npcs = json::array();
  for (const auto& n : s.npcs) npcs.push_back({{"id", n.id}, {"lane", n.lane}, {"x", n.x}, {"speed", n.speed}});
  return json{{"step", s.step},
              {"agent", {{"lane", s.agent.lane}, {"x", s.agent.x}, {"speed", s.agent.speed}}},
              {"npcs", std::move(npcs)}};
}

inline abs::RawState raw_state_from_json(const json& j, const std::string& where) {
  abs::RawState s;
  s.step = detail::get<int>(j, "step", where);
  const json& a = detail::field(j, "agent", where);
  s.agent = {detail::get<int>(a, "lane", where + "agent."), detail::get<double>(a, "x", where + "agent."),
             detail::get<double>(a, "speed", where + "agent.")};
  const json& npcs = detail::field(j, "npcs", where);
  if (!npcs.is_array()) throw ValidationError(where + "npcs", "expected an array");
  for (std::size_t i = 0; i < npcs.size(); ++i) {
    const std::string w = where + "npcs[" + std::to_string(i) + "].";
    s.npcs.push_back({detail::get<int>(npcs[i], "id", w), detail::get<int>(npcs[i], "lane", w),
                      detail::get<double>(npcs[i], "x", w), detail::get<double>(npcs[i], "speed", w)});
  }
  return s;
}

inline json to_json(const abs::Step& s) {
  return json{{"raw", to_json(s.raw)},
              {"action", std::string(to_string(s.action))},
              {"letter", s.letter.names()},
              {"active_policy", std::string(to_string(s.active_policy))}};
}

inline abs::Step step_from_json(const json& j, const std::string& where) {
  abs::Step s;
  s.raw = raw_state_from_json(detail::field(j, "raw", where), where + "raw.");
  try {
    s.action = abs::action_from_string(detail::get<std::string>(j, "action", where));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(where + "action", e.what());
  }
  s.letter = ltlf::Letter(detail::get<std::vector<std::string>>(j, "letter", where));
  auto policy = detail::get<std::string>(j, "active_policy", where);
  if (policy != "A" && policy != "B") throw ValidationError(where + "active_policy", "expected A or B");
  s.active_policy = policy == "A" ? abs::PolicyTag::A : abs::PolicyTag::B;
  return s;
}

inline json to_json(const abs::Episode& ep) {
  json steps = json::array();
  for (const auto& s : ep.steps) steps.push_back(to_json(s));
  return json{{"id", ep.id},
              {"seed", ep.seed},
              {"agent_kind", std::string(to_string(ep.agent_kind))},
              {"config", to_json(ep.config)},
              {"steps", std::move(steps)}};
}

inline abs::Episode episode_from_json(const json& j) {
  abs::Episode ep;
  ep.id = detail::get<std::string>(j, "id", "");
  ep.seed = detail::get<std::uint64_t>(j, "seed", "");
  ep.agent_kind = abs::agent_kind_from_string(detail::get<std::string>(j, "agent_kind", ""));
  ep.config = sim_config_from_json(detail::field(j, "config", ""));
  const json& steps = detail::field(j, "steps", "");
  if (!steps.is_array()) throw ValidationError("steps", "expected an array");
  ep.steps.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    ep.steps.push_back(step_from_json(steps[i], "steps[" + std::to_string(i) + "]."));
  }
  return ep;
}

inline json to_json(const abs::PredicateDef& d) {
  return json{{"name", d.name},
              {"kind", std::string(to_string(d.kind))},
              {"group", std::string(to_string(d.group))},
              {"params", d.params}};
}

inline json to_json(const abs::Vocabulary& v) {
  json out = json::array();
  for (const auto& d : v.predicates()) out.push_back(to_json(d));
  return out;
}

inline json to_json(const abs::VocabParams& p) {
  return json{{"lanes", p.lanes}, {"proximity", p.proximity}, {"adjacent_proximity", p.adjacent_proximity}};
}

}  // namespace tracequery::store
