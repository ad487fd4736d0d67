#pragma once

// Highway-style raw states and the predicate vocabulary that abstracts them
// into letters.
//
// Lanes are numbered 1..L from the top of the rendered road; "left" moves
// toward lane 1. The agent is `behind` when a car is ahead of it in its own
// lane, `in-front` when a car trails it, `above` when a car drives in the
// next lane down (lane + 1) and `below` for the next lane up (lane - 1).

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracequery/error.hpp"
#include "tracequery/ltlf/formula.hpp"

namespace tracequery::abstraction {

using ltlf::Letter;

struct AgentState {
  int lane = 1;
  double x = 0.0;
  double speed = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct NpcState {
  int id = 0;
  int lane = 1;
  double x = 0.0;
  double speed = 0.0;

  friend bool operator==(const NpcState&, const NpcState&) = default;
};

struct RawState {
  AgentState agent;
  std::vector<NpcState> npcs;
  int step = 0;

  friend bool operator==(const RawState&, const RawState&) = default;
};

enum class Action { Left, Right, Faster, Slower, Idle };

inline constexpr Action kAllActions[] = {Action::Left, Action::Right, Action::Faster, Action::Slower, Action::Idle};

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::Left:
      return "left";
    case Action::Right:
      return "right";
    case Action::Faster:
      return "faster";
    case Action::Slower:
      return "slower";
    case Action::Idle:
      return "idle";
  }
  return "idle";
}

inline Action action_from_string(std::string_view s) {
  for (Action a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown action '" + std::string(s) + "'");
}

enum class PredicateKind { State, Action };
// Drop-down group a predicate is offered under.
enum class PredicateGroup { Lane, Relation, Action };

inline std::string_view to_string(PredicateKind k) { return k == PredicateKind::State ? "state" : "action"; }

inline std::string_view to_string(PredicateGroup g) {
  switch (g) {
    case PredicateGroup::Lane:
      return "lane";
    case PredicateGroup::Relation:
      return "relation";
    case PredicateGroup::Action:
      return "action";
  }
  return "relation";
}

struct PredicateDef {
  std::string name;
  PredicateKind kind = PredicateKind::State;
  PredicateGroup group = PredicateGroup::Relation;
  std::function<bool(const RawState&, Action)> evaluator;
  std::map<std::string, double> params;
};

// Thresholds of the default highway vocabulary, in meters.
struct VocabParams {
  int lanes = 4;
  double proximity = 15.0;           // behind / in-front
  double adjacent_proximity = 10.0;  // above / below

  friend bool operator==(const VocabParams&, const VocabParams&) = default;
};

// An ordered list of predicates with unique names.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<PredicateDef> defs, std::optional<VocabParams> params = std::nullopt)
      : defs_(std::move(defs)), params_(params) {
    if (defs_.empty()) throw std::invalid_argument("vocabulary must not be empty");
    for (std::size_t i = 0; i < defs_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (defs_[i].name == defs_[j].name) {
          throw std::invalid_argument("duplicate predicate '" + defs_[i].name + "'");
        }
      }
    }
  }

  const std::vector<PredicateDef>& predicates() const noexcept { return defs_; }
  std::size_t size() const noexcept { return defs_.size(); }
  // Parameters when this is a default highway vocabulary.
  const std::optional<VocabParams>& params() const noexcept { return params_; }

  const PredicateDef* find(std::string_view name) const {
    for (const auto& d : defs_) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& d : defs_) out.insert(d.name);
    return out;
  }

  // Names in declaration order.
  std::vector<std::string> names_list() const {
    std::vector<std::string> out;
    for (const auto& d : defs_) out.push_back(d.name);
    return out;
  }

  // Vocabularies compare by predicate names, kinds, groups and parameters.
  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    if (a.defs_.size() != b.defs_.size() || a.params_ != b.params_) return false;
    for (std::size_t i = 0; i < a.defs_.size(); ++i) {
      const auto& x = a.defs_[i];
      const auto& y = b.defs_[i];
      if (x.name != y.name || x.kind != y.kind || x.group != y.group || x.params != y.params) return false;
    }
    return true;
  }

 private:
  std::vector<PredicateDef> defs_;
  std::optional<VocabParams> params_;
};

inline std::string lane_predicate(int lane) { return "lane-" + std::to_string(lane); }

inline std::string action_predicate(Action a) { return "action-" + std::string(to_string(a)); }

// lane-1..lane-L, behind, in-front, above, below and one predicate per action.
inline Vocabulary default_vocab(const VocabParams& params) {
  if (params.lanes < 2) throw std::invalid_argument("a highway needs at least 2 lanes");
  if (!(params.proximity > 0) || !(params.adjacent_proximity > 0)) {
    throw std::invalid_argument("proximity thresholds must be positive");
  }
  std::vector<PredicateDef> defs;
  for (int lane = 1; lane <= params.lanes; ++lane) {
    defs.push_back({lane_predicate(lane), PredicateKind::State, PredicateGroup::Lane,
                    [lane](const RawState& s, Action) { return s.agent.lane == lane; },
                    {}});
  }

  const double d = params.proximity;
  const double da = params.adjacent_proximity;
  defs.push_back({"behind", PredicateKind::State, PredicateGroup::Relation,
                  [d](const RawState& s, Action) {
                    for (const auto& n : s.npcs) {
                      double dx = n.x - s.agent.x;
                      if (n.lane == s.agent.lane && dx >= 0 && dx <= d) return true;
                    }
                    return false;
                  },
                  {{"proximity", d}}});
  defs.push_back({"in-front", PredicateKind::State, PredicateGroup::Relation,
                  [d](const RawState& s, Action) {
                    for (const auto& n : s.npcs) {
                      double dx = s.agent.x - n.x;
                      if (n.lane == s.agent.lane && dx > 0 && dx <= d) return true;
                    }
                    return false;
                  },
                  {{"proximity", d}}});
  defs.push_back({"above", PredicateKind::State, PredicateGroup::Relation,
                  [da](const RawState& s, Action) {
                    for (const auto& n : s.npcs) {
                      if (n.lane == s.agent.lane + 1 && std::abs(n.x - s.agent.x) <= da) return true;
                    }
                    return false;
                  },
                  {{"proximity", da}}});
  defs.push_back({"below", PredicateKind::State, PredicateGroup::Relation,
                  [da](const RawState& s, Action) {
                    for (const auto& n : s.npcs) {
                      if (n.lane == s.agent.lane - 1 && std::abs(n.x - s.agent.x) <= da) return true;
                    }
                    return false;
                  },
                  {{"proximity", da}}});

  for (Action a : kAllActions) {
    defs.push_back({action_predicate(a), PredicateKind::Action, PredicateGroup::Action,
                    [a](const RawState&, Action taken) { return taken == a; },
                    {}});
  }
  return Vocabulary(std::move(defs), params);
}

inline Vocabulary default_vocab(int lanes) {
  VocabParams p;
  p.lanes = lanes;
  return default_vocab(p);
}

// P(s): names of the predicates that hold on (state, action).
inline Letter abstract_state(const RawState& s, Action a, const Vocabulary& vocab) {
  std::vector<std::string> names;
  for (const auto& d : vocab.predicates()) {
    if (d.evaluator(s, a)) names.push_back(d.name);
  }
  return Letter(std::move(names));
}

}  // namespace tracequery::abstraction
