#pragma once

// Explicit finite automata over the effective alphabet of an LTLf formula.
//
// compile() explores the closure of formula progression: every state is a
// canonical residual, the transition on a letter leads to the residual of
// that letter, and a state accepts when its residual holds on the empty
// remainder. The result is deterministic. reverse() flips it into an NFA
// that reads words back to front.
//
// Letters are projected onto the formula's own predicates ("effective
// predicates"); bit i of a LetterMask stands for effective_predicates()[i].

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracequery/error.hpp"
#include "tracequery/ltlf/formula.hpp"
#include "tracequery/ltlf/progression.hpp"
#include "tracequery/ltlf/syntax.hpp"

namespace tracequery::automata {

using ltlf::Formula;
using ltlf::Letter;

using StateId = std::uint32_t;
using LetterMask = std::uint64_t;

inline constexpr std::size_t kMaxEffectivePredicates = 24;

// Conjunction of literals: the bits in `care` must equal those in `value`.
struct Cube {
  LetterMask care = 0;
  LetterMask value = 0;

  bool satisfied_by(LetterMask letter) const noexcept { return (letter & care) == value; }
  friend bool operator==(const Cube&, const Cube&) = default;
};

// Disjunction of cubes.
struct Guard {
  std::vector<Cube> cubes;

  bool satisfied_by(LetterMask letter) const noexcept {
    return std::any_of(cubes.begin(), cubes.end(), [&](const Cube& c) { return c.satisfied_by(letter); });
  }
  friend bool operator==(const Guard&, const Guard&) = default;
};

struct Transition {
  StateId source;
  Guard guard;
  StateId target;
};

// A set of automaton states; the empty set is the dead configuration.
class StateSet {
 public:
  StateSet() = default;
  StateSet(std::initializer_list<StateId> states) : states_(states) { canonicalize(); }
  explicit StateSet(std::vector<StateId> states) : states_(std::move(states)) { canonicalize(); }

  bool empty() const noexcept { return states_.empty(); }
  std::size_t size() const noexcept { return states_.size(); }
  bool contains(StateId s) const { return std::binary_search(states_.begin(), states_.end(), s); }
  auto begin() const noexcept { return states_.begin(); }
  auto end() const noexcept { return states_.end(); }
  const std::vector<StateId>& states() const noexcept { return states_; }

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  void canonicalize() {
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  }
  std::vector<StateId> states_;
};

class SymbolicAutomaton {
 public:
  SymbolicAutomaton(std::vector<std::string> effective_predicates, std::vector<Formula> labels,
                    std::vector<Transition> transitions, std::vector<StateId> initial,
                    std::vector<StateId> accepting)
      : predicates_(std::move(effective_predicates)),
        labels_(std::move(labels)),
        transitions_(std::move(transitions)),
        initial_(std::move(initial)),
        accepting_(std::move(accepting)),
        out_(labels_.size()),
        accepting_flag_(labels_.size(), 0) {
    if (predicates_.size() > kMaxEffectivePredicates) {
      throw StateBudgetExceeded("formula mentions more than " + std::to_string(kMaxEffectivePredicates) +
                                " predicates");
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      const auto& t = transitions_[i];
      if (t.source >= labels_.size() || t.target >= labels_.size()) {
        throw std::invalid_argument("transition references an unknown state");
      }
      out_[t.source].push_back(i);
    }
    for (StateId s : accepting_.states()) {
      if (s >= labels_.size()) throw std::invalid_argument("accepting state out of range");
      accepting_flag_[s] = 1;
    }
    for (StateId s : initial_.states()) {
      if (s >= labels_.size()) throw std::invalid_argument("initial state out of range");
    }
  }

  const std::vector<std::string>& effective_predicates() const noexcept { return predicates_; }
  std::size_t state_count() const noexcept { return labels_.size(); }
  // Residual formula carried by a state.
  const Formula& label(StateId s) const { return labels_.at(s); }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const StateSet& initial() const noexcept { return initial_; }
  const StateSet& accepting() const noexcept { return accepting_; }
  bool is_accepting_state(StateId s) const { return accepting_flag_.at(s) != 0; }

  std::span<const std::size_t> out_edges(StateId s) const { return out_.at(s); }

  LetterMask project(const Letter& letter) const {
    LetterMask m = 0;
    for (std::size_t i = 0; i < predicates_.size(); ++i) {
      if (letter.contains(predicates_[i])) m |= LetterMask{1} << i;
    }
    return m;
  }

  // Writes the successors of `from` on `letter` into `into`.
  void step_into(const StateSet& from, LetterMask letter, std::vector<StateId>& into) const {
    into.clear();
    for (StateId s : from) {
      for (std::size_t e : out_[s]) {
        if (transitions_[e].guard.satisfied_by(letter)) into.push_back(transitions_[e].target);
      }
    }
  }

  StateSet step(const StateSet& from, LetterMask letter) const {
    std::vector<StateId> next;
    step_into(from, letter, next);
    return StateSet(std::move(next));
  }

  StateSet step(const StateSet& from, const Letter& letter) const { return step(from, project(letter)); }

  bool is_accepting(const StateSet& s) const {
    return std::any_of(s.begin(), s.end(), [&](StateId q) { return accepting_flag_[q] != 0; });
  }

  bool accepts(std::span<const Letter> word) const {
    StateSet current = initial_;
    for (const auto& letter : word) {
      current = step(current, letter);
      if (current.empty()) return false;
    }
    return is_accepting(current);
  }

 private:
  std::vector<std::string> predicates_;
  std::vector<Formula> labels_;
  std::vector<Transition> transitions_;
  StateSet initial_;
  StateSet accepting_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<char> accepting_flag_;
};

struct CompileOptions {
  std::size_t state_budget = 4096;
};

namespace detail {

// Two-level minimization (Quine-McCluskey prime implicants, greedy cover)
// of a set of minterms over `bits` variables.
inline std::vector<Cube> minimize(const std::vector<LetterMask>& minterms, unsigned bits) {
  const LetterMask full = bits == 64 ? ~LetterMask{0} : (LetterMask{1} << bits) - 1;
  if (minterms.size() == (std::size_t{1} << bits)) return {Cube{0, 0}};

  std::vector<Cube> layer;
  for (LetterMask m : minterms) layer.push_back(Cube{full, m});
  std::vector<Cube> primes;
  while (!layer.empty()) {
    std::vector<char> used(layer.size(), 0);
    std::vector<Cube> merged;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      for (std::size_t j = i + 1; j < layer.size(); ++j) {
        if (layer[i].care != layer[j].care) continue;
        LetterMask diff = layer[i].value ^ layer[j].value;
        if (diff == 0 || (diff & (diff - 1)) != 0) continue;
        used[i] = used[j] = 1;
        Cube c{layer[i].care & ~diff, layer[i].value & ~diff};
        if (std::find(merged.begin(), merged.end(), c) == merged.end()) merged.push_back(c);
      }
    }
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!used[i] && std::find(primes.begin(), primes.end(), layer[i]) == primes.end()) primes.push_back(layer[i]);
    }
    layer = std::move(merged);
  }

  std::vector<LetterMask> uncovered = minterms;
  std::vector<Cube> cover;
  while (!uncovered.empty()) {
    std::size_t best = 0, best_count = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      auto n = static_cast<std::size_t>(std::count_if(uncovered.begin(), uncovered.end(),
                                                      [&](LetterMask m) { return primes[i].satisfied_by(m); }));
      if (n > best_count) {
        best = i;
        best_count = n;
      }
    }
    cover.push_back(primes[best]);
    std::erase_if(uncovered, [&](LetterMask m) { return primes[best].satisfied_by(m); });
  }
  std::sort(cover.begin(), cover.end(),
            [](const Cube& a, const Cube& b) { return a.care != b.care ? a.care < b.care : a.value < b.value; });
  return cover;
}

// Spreads the low bits of `local` onto the global bit positions in `positions`.
inline LetterMask scatter(LetterMask local, const std::vector<unsigned>& positions) {
  LetterMask out = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (local & (LetterMask{1} << i)) out |= LetterMask{1} << positions[i];
  }
  return out;
}

}  // namespace detail

// Builds the deterministic automaton of `f`. Throws StateBudgetExceeded when
// more than `options.state_budget` states are reached.
inline SymbolicAutomaton compile(const Formula& f, const CompileOptions& options = {}) {
  using ltlf::dnf::Dnf;
  std::vector<std::string> preds = ltlf::predicates_of(f);
  if (preds.size() > kMaxEffectivePredicates) {
    throw StateBudgetExceeded("formula mentions " + std::to_string(preds.size()) + " predicates; at most " +
                              std::to_string(kMaxEffectivePredicates) + " are supported");
  }

  ltlf::Progressor progressor;
  std::vector<Formula> labels;
  std::vector<Dnf> residuals;
  std::unordered_map<Formula, StateId, ltlf::FormulaHash> index;

  auto intern = [&](Dnf d) -> StateId {
    Formula label = ltlf::dnf::to_formula(d);
    auto it = index.find(label);
    if (it != index.end()) return it->second;
    if (labels.size() >= options.state_budget) {
      throw StateBudgetExceeded("automaton exceeds the state budget of " + std::to_string(options.state_budget) +
                                " states");
    }
    auto id = static_cast<StateId>(labels.size());
    index.emplace(label, id);
    labels.push_back(std::move(label));
    residuals.push_back(std::move(d));
    return id;
  };

  std::vector<Transition> transitions;
  const StateId root = intern(ltlf::dnf::from_formula(f));
  std::vector<char> holds(preds.size(), 0);
  auto contains = [&](const std::string& name) {
    auto it = std::lower_bound(preds.begin(), preds.end(), name);
    return it != preds.end() && *it == name && holds[static_cast<std::size_t>(it - preds.begin())];
  };

  for (StateId s = 0; s < labels.size(); ++s) {
    // The successor only depends on predicates that occur in the residual.
    std::vector<unsigned> local;
    for (const auto& name : ltlf::predicates_of(labels[s])) {
      local.push_back(static_cast<unsigned>(std::lower_bound(preds.begin(), preds.end(), name) - preds.begin()));
    }
    std::map<StateId, std::vector<LetterMask>> by_target;
    const Dnf current = residuals[s];
    for (LetterMask m = 0; m < (LetterMask{1} << local.size()); ++m) {
      std::fill(holds.begin(), holds.end(), 0);
      for (std::size_t i = 0; i < local.size(); ++i) holds[local[i]] = (m >> i) & 1;
      StateId target = intern(progressor.progress(current, contains));
      by_target[target].push_back(m);
    }
    for (const auto& [target, minterms] : by_target) {
      Guard guard;
      for (const Cube& c : detail::minimize(minterms, static_cast<unsigned>(local.size()))) {
        guard.cubes.push_back(Cube{detail::scatter(c.care, local), detail::scatter(c.value, local)});
      }
      transitions.push_back(Transition{s, std::move(guard), target});
    }
  }

  std::vector<StateId> accepting;
  for (StateId s = 0; s < labels.size(); ++s) {
    if (ltlf::accept_at_end(labels[s])) accepting.push_back(s);
  }
  return SymbolicAutomaton(std::move(preds), std::move(labels), std::move(transitions), {root},
                           std::move(accepting));
}

// Swaps initial and accepting states and flips every transition. The result
// accepts exactly the mirror images of the words `a` accepts.
inline SymbolicAutomaton reverse(const SymbolicAutomaton& a) {
  std::vector<Formula> labels;
  labels.reserve(a.state_count());
  for (StateId s = 0; s < a.state_count(); ++s) labels.push_back(a.label(s));
  std::vector<Transition> flipped;
  flipped.reserve(a.transitions().size());
  for (const auto& t : a.transitions()) flipped.push_back(Transition{t.target, t.guard, t.source});
  return SymbolicAutomaton(a.effective_predicates(), std::move(labels), std::move(flipped), a.accepting().states(),
                           a.initial().states());
}

inline StateSet step(const SymbolicAutomaton& a, const StateSet& s, const Letter& letter) { return a.step(s, letter); }

inline bool is_accepting(const SymbolicAutomaton& a, const StateSet& s) { return a.is_accepting(s); }

// True when every state has exactly one satisfied out-guard for every
// effective letter. Guards of a state only mention predicates of its own
// residual, so enumerating those bits covers the whole effective alphabet.
inline bool is_deterministic(const SymbolicAutomaton& a) {
  for (StateId s = 0; s < a.state_count(); ++s) {
    LetterMask used = 0;
    for (std::size_t e : a.out_edges(s)) {
      for (const auto& c : a.transitions()[e].guard.cubes) used |= c.care;
    }
    std::vector<unsigned> bits;
    for (unsigned i = 0; i < a.effective_predicates().size(); ++i) {
      if (used & (LetterMask{1} << i)) bits.push_back(i);
    }
    for (LetterMask m = 0; m < (LetterMask{1} << bits.size()); ++m) {
      LetterMask letter = detail::scatter(m, bits);
      int satisfied = 0;
      for (std::size_t e : a.out_edges(s)) satisfied += a.transitions()[e].guard.satisfied_by(letter);
      if (satisfied != 1) return false;
    }
  }
  return true;
}

// Guard as a propositional formula over the effective predicates.
inline Formula guard_formula(const Guard& g, const std::vector<std::string>& preds) {
  std::vector<Formula> cubes;
  for (const auto& c : g.cubes) {
    std::vector<Formula> lits;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      LetterMask bit = LetterMask{1} << i;
      if (!(c.care & bit)) continue;
      lits.push_back(c.value & bit ? ltlf::pred(preds[i]) : ltlf::lnot(ltlf::pred(preds[i])));
    }
    cubes.push_back(ltlf::conjunction(lits));
  }
  return ltlf::disjunction(cubes);
}

// Plain-text adjacency listing for inspection.
inline std::string to_text(const SymbolicAutomaton& a) {
  std::ostringstream out;
  out << "predicates:";
  for (const auto& p : a.effective_predicates()) out << ' ' << p;
  out << "\nstates: " << a.state_count() << "\n";
  for (StateId s = 0; s < a.state_count(); ++s) {
    out << "  " << s << (a.initial().contains(s) ? " init" : "") << (a.is_accepting_state(s) ? " acc" : "")
        << " [" << ltlf::to_string(a.label(s)) << "]\n";
    for (std::size_t e : a.out_edges(s)) {
      const auto& t = a.transitions()[e];
      out << "    --" << ltlf::to_string(guard_formula(t.guard, a.effective_predicates())) << "--> " << t.target
          << "\n";
    }
  }
  return out.str();
}

}  // namespace tracequery::automata
