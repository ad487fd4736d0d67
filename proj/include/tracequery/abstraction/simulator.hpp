#pragma once

// Seeded highway simulator with scripted agents.
//
// Discrete time: every tick each car advances by its speed (meters per
// tick), lane changes move one lane instantly. NPCs keep their lane and
// speed except for occasional seeded lane changes, and are recycled to the
// far side of the window once they drift more than `spawn_range` meters
// from the agent. Collisions only co-locate cars; episodes always run for
// `steps` ticks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tracequery/abstraction/highway.hpp"
#include "tracequery/error.hpp"
#include "tracequery/random.hpp"

namespace tracequery::abstraction {

enum class AgentKind { Plain, TopLane, Collision, DualTrigger };

inline std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Plain:
      return "plain";
    case AgentKind::TopLane:
      return "toplane";
    case AgentKind::Collision:
      return "collision";
    case AgentKind::DualTrigger:
      return "dual-trigger";
  }
  return "plain";
}

inline AgentKind agent_kind_from_string(std::string_view s) {
  for (AgentKind k : {AgentKind::Plain, AgentKind::TopLane, AgentKind::Collision, AgentKind::DualTrigger}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("agent", "unknown agent kind '" + std::string(s) + "'");
}

// Ground-truth tag of the policy that chose a step's action.
enum class PolicyTag { A, B };

inline std::string_view to_string(PolicyTag p) { return p == PolicyTag::A ? "A" : "B"; }

struct SimConfig {
  int lanes = 4;
  int steps = 200;
  int npc_count = 6;
  double agent_speed = 25.0;  // cruise speed, m per tick
  double npc_speed_min = 20.0;
  double npc_speed_max = 30.0;
  double min_speed = 15.0;
  double max_speed = 35.0;
  double speed_delta = 2.5;  // change per faster/slower action
  double proximity = 15.0;
  double adjacent_proximity = 10.0;
  double npc_lane_change_prob = 0.05;
  double agent_lane_change_prob = 0.08;
  double spawn_range = 100.0;
  // State predicates whose first joint occurrence hands control to policy B.
  std::vector<std::string> trigger{"lane-2", "above"};

  VocabParams vocab_params() const { return VocabParams{lanes, proximity, adjacent_proximity}; }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Step {
  RawState raw;
  Action action = Action::Idle;
  Letter letter;
  PolicyTag active_policy = PolicyTag::A;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Episode {
  std::string id;
  std::uint64_t seed = 0;
  AgentKind agent_kind = AgentKind::Plain;
  SimConfig config;
  std::vector<Step> steps;

  ltlf::AbstractTrace letters() const {
    ltlf::AbstractTrace out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.letter);
    return out;
  }

  friend bool operator==(const Episode&, const Episode&) = default;
};

inline void validate(const SimConfig& cfg) {
  if (cfg.lanes < 2) throw ValidationError("lanes", "at least 2 lanes are required");
  if (cfg.steps < 1) throw ValidationError("steps", "must be at least 1");
  if (cfg.npc_count < 0) throw ValidationError("npc_count", "must not be negative");
  if (!(cfg.npc_speed_min >= 0) || cfg.npc_speed_min > cfg.npc_speed_max) {
    throw ValidationError("npc_speed_min", "need 0 <= npc_speed_min <= npc_speed_max");
  }
  if (!(cfg.min_speed >= 0) || cfg.min_speed > cfg.max_speed) {
    throw ValidationError("min_speed", "need 0 <= min_speed <= max_speed");
  }
  if (cfg.agent_speed < cfg.min_speed || cfg.agent_speed > cfg.max_speed) {
    throw ValidationError("agent_speed", "must lie within [min_speed, max_speed]");
  }
  if (!(cfg.speed_delta >= 0)) throw ValidationError("speed_delta", "must not be negative");
  if (!(cfg.proximity > 0)) throw ValidationError("proximity", "must be positive");
  if (!(cfg.adjacent_proximity > 0)) throw ValidationError("adjacent_proximity", "must be positive");
  if (!(cfg.spawn_range > cfg.proximity)) throw ValidationError("spawn_range", "must exceed proximity");
  for (double p : {cfg.npc_lane_change_prob, cfg.agent_lane_change_prob}) {
    if (!(p >= 0 && p <= 1)) throw ValidationError("lane_change_prob", "must be a probability");
  }
  if (cfg.trigger.empty()) throw ValidationError("trigger", "needs at least one predicate");
  const Vocabulary vocab = default_vocab(cfg.vocab_params());
  for (const auto& name : cfg.trigger) {
    const PredicateDef* d = vocab.find(name);
    if (!d) throw ValidationError("trigger", "unknown predicate '" + name + "'");
    if (d->kind != PredicateKind::State) throw ValidationError("trigger", "'" + name + "' is not a state predicate");
  }
}

namespace detail {

class Simulation {
 public:
  Simulation(const SimConfig& cfg, std::uint64_t seed, AgentKind kind)
      : cfg_(cfg), kind_(kind), rng_(seed), vocab_(default_vocab(cfg.vocab_params())) {}

  std::vector<Step> run() {
    RawState s;
    s.agent.lane = 1 + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(cfg_.lanes)));
    s.agent.x = 0.0;
    s.agent.speed = cfg_.agent_speed;
    for (int i = 0; i < cfg_.npc_count; ++i) {
      NpcState n;
      n.id = i;
      n.lane = random_lane();
      n.x = uniform_real(rng_, -cfg_.spawn_range, cfg_.spawn_range);
      n.speed = uniform_real(rng_, cfg_.npc_speed_min, cfg_.npc_speed_max);
      s.npcs.push_back(n);
    }

    std::vector<Step> steps;
    steps.reserve(static_cast<std::size_t>(cfg_.steps));
    PolicyTag policy = PolicyTag::A;
    for (int t = 0; t < cfg_.steps; ++t) {
      s.step = t;
      if (kind_ == AgentKind::DualTrigger && policy == PolicyTag::A && trigger_holds(s)) policy = PolicyTag::B;
      Action a = clamp(s, choose(s, policy));
      steps.push_back(Step{s, a, abstract_state(s, a, vocab_), policy});
      advance(s, a);
    }
    return steps;
  }

 private:
  int random_lane() { return 1 + static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(cfg_.lanes))); }

  bool trigger_holds(const RawState& s) const {
    Letter l = abstract_state(s, Action::Idle, vocab_);
    return std::all_of(cfg_.trigger.begin(), cfg_.trigger.end(), [&](const std::string& p) { return l.contains(p); });
  }

  Action choose(const RawState& s, PolicyTag policy) {
    switch (kind_) {
      case AgentKind::Plain:
        return plain(s);
      case AgentKind::TopLane:
        return toplane(s);
      case AgentKind::Collision:
        return collision(s);
      case AgentKind::DualTrigger:
        return policy == PolicyTag::A ? plain(s) : collision(s);
    }
    return Action::Idle;
  }

  Action clamp(const RawState& s, Action a) const {
    if (a == Action::Left && s.agent.lane == 1) return Action::Idle;
    if (a == Action::Right && s.agent.lane == cfg_.lanes) return Action::Idle;
    return a;
  }

  bool lane_free(const RawState& s, int lane) const {
    if (lane < 1 || lane > cfg_.lanes) return false;
    return std::none_of(s.npcs.begin(), s.npcs.end(), [&](const NpcState& n) {
      return n.lane == lane && std::abs(n.x - s.agent.x) <= cfg_.proximity;
    });
  }

  bool blocked_ahead(const RawState& s) const {
    return std::any_of(s.npcs.begin(), s.npcs.end(), [&](const NpcState& n) {
      double dx = n.x - s.agent.x;
      return n.lane == s.agent.lane && dx >= 0 && dx <= cfg_.proximity;
    });
  }

  // Move to a random free neighbouring lane, if any.
  std::optional<Action> dodge(const RawState& s) {
    std::vector<Action> options;
    if (lane_free(s, s.agent.lane - 1)) options.push_back(Action::Left);
    if (lane_free(s, s.agent.lane + 1)) options.push_back(Action::Right);
    if (options.empty()) return std::nullopt;
    return options[uniform_below(rng_, options.size())];
  }

  // Keep lane at cruise speed; sidestep or brake when a car is close ahead.
  Action plain(const RawState& s) {
    if (blocked_ahead(s)) {
      if (auto a = dodge(s)) return *a;
      return Action::Slower;
    }
    if (s.agent.speed + 1e-9 < cfg_.agent_speed) return Action::Faster;
    if (s.agent.speed - 1e-9 > cfg_.agent_speed) return Action::Slower;
    if (coin(rng_, cfg_.agent_lane_change_prob)) {
      if (auto a = dodge(s)) return *a;
    }
    return Action::Idle;
  }

  Action toplane(const RawState& s) {
    if (s.agent.lane > 1 && lane_free(s, s.agent.lane - 1) && !blocked_ahead(s)) return Action::Left;
    return plain(s);
  }

  // Steer at the nearest car.
  Action collision(const RawState& s) const {
    const NpcState* target = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& n : s.npcs) {
      double d = std::abs(n.x - s.agent.x) + 5.0 * std::abs(n.lane - s.agent.lane);
      if (d < best) {
        best = d;
        target = &n;
      }
    }
    if (!target) return Action::Faster;
    if (target->lane < s.agent.lane) return Action::Left;
    if (target->lane > s.agent.lane) return Action::Right;
    if (target->x > s.agent.x + 1.0) return Action::Faster;
    if (target->x < s.agent.x - 1.0) return Action::Slower;
    return Action::Idle;
  }

  void advance(RawState& s, Action a) {
    switch (a) {
      case Action::Left:
        s.agent.lane -= 1;
        break;
      case Action::Right:
        s.agent.lane += 1;
        break;
      case Action::Faster:
        s.agent.speed = std::min(cfg_.max_speed, s.agent.speed + cfg_.speed_delta);
        break;
      case Action::Slower:
        s.agent.speed = std::max(cfg_.min_speed, s.agent.speed - cfg_.speed_delta);
        break;
      case Action::Idle:
        break;
    }
    s.agent.x += s.agent.speed;
    for (auto& n : s.npcs) {
      n.x += n.speed;
      if (coin(rng_, cfg_.npc_lane_change_prob)) {
        int lane = n.lane + (coin(rng_) ? 1 : -1);
        if (lane >= 1 && lane <= cfg_.lanes) n.lane = lane;
      }
      double dx = n.x - s.agent.x;
      if (dx > cfg_.spawn_range || dx < -cfg_.spawn_range) {
        double offset = uniform_real(rng_, 0.0, cfg_.proximity);
        n.x = dx > 0 ? s.agent.x - cfg_.spawn_range + offset : s.agent.x + cfg_.spawn_range - offset;
        n.lane = random_lane();
        n.speed = uniform_real(rng_, cfg_.npc_speed_min, cfg_.npc_speed_max);
      }
    }
  }

  SimConfig cfg_;
  AgentKind kind_;
  Rng rng_;
  Vocabulary vocab_;
};

}  // namespace detail

// Runs one episode. Identical (cfg, seed, kind) give identical episodes.
inline Episode simulate(const SimConfig& cfg, std::uint64_t seed, AgentKind kind, std::string id = {}) {
  validate(cfg);
  Episode ep;
  ep.id = id.empty() ? "ep-" + std::to_string(seed) : std::move(id);
  ep.seed = seed;
  ep.agent_kind = kind;
  ep.config = cfg;
  ep.steps = detail::Simulation(cfg, seed, kind).run();
  return ep;
}

// Index of the first policy-B step, if any.
inline std::optional<std::size_t> trigger_index(const Episode& ep) {
  for (std::size_t i = 0; i < ep.steps.size(); ++i) {
    if (ep.steps[i].active_policy == PolicyTag::B) return i;
  }
  return std::nullopt;
}

}  // namespace tracequery::abstraction
