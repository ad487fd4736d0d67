#pragma once

// The drop-down query template: a start description, an end description and
// an optional constraint on what happens in between, each a conjunction of
// predicate literals. to_ltlf() instantiates the fixed LTLf encodings.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tracequery/error.hpp"
#include "tracequery/ltlf/formula.hpp"

namespace tracequery::query {

using ltlf::Formula;

struct PredicateLiteral {
  std::string predicate;
  bool negated = false;

  friend bool operator==(const PredicateLiteral&, const PredicateLiteral&) = default;
  friend auto operator<=>(const PredicateLiteral&, const PredicateLiteral&) = default;
};

// Conjunction of literals; empty means `true`.
struct PropFormula {
  std::vector<PredicateLiteral> literals;

  bool empty() const noexcept { return literals.empty(); }

  Formula to_formula() const {
    std::vector<Formula> lits;
    lits.reserve(literals.size());
    for (const auto& l : literals) {
      Formula p = ltlf::pred(l.predicate);
      lits.push_back(l.negated ? ltlf::lnot(p) : p);
    }
    return ltlf::conjunction(lits);
  }

  // Same literal set, regardless of order or repetition.
  bool same_literals(const PropFormula& other) const {
    auto a = literals, b = other.literals;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return a == b;
  }

  friend bool operator==(const PropFormula&, const PropFormula&) = default;
};

enum class ConstraintKind { Changes, StaysConstant, ChangesInto };

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Changes:
      return "changes";
    case ConstraintKind::StaysConstant:
      return "stays_constant";
    case ConstraintKind::ChangesInto:
      return "changes_into";
  }
  return "changes";
}

inline std::optional<ConstraintKind> constraint_kind_from_string(std::string_view s) {
  for (auto k : {ConstraintKind::Changes, ConstraintKind::StaysConstant, ConstraintKind::ChangesInto}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct Constraint {
  ConstraintKind kind = ConstraintKind::Changes;
  PropFormula c;
  std::optional<PropFormula> c_prime;  // changes_into only

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct StructuredQuery {
  PropFormula start;
  PropFormula end;
  std::optional<Constraint> constraint;

  friend bool operator==(const StructuredQuery&, const StructuredQuery&) = default;
};

// Removes `true`/`false` operands that the template introduces for empty
// components. Leaves every other part of the formula untouched, so the
// result stays syntactically the template instance.
inline Formula simplify_constants(const Formula& f) {
  using ltlf::Op;
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Pred:
      return f;
    case Op::Not: {
      Formula g = simplify_constants(f.lhs());
      if (g.op() == Op::True) return ltlf::bottom();
      if (g.op() == Op::False) return ltlf::top();
      return ltlf::lnot(g);
    }
    case Op::And: {
      Formula a = simplify_constants(f.lhs()), b = simplify_constants(f.rhs());
      if (a.op() == Op::False || b.op() == Op::False) return ltlf::bottom();
      if (a.op() == Op::True) return b;
      if (b.op() == Op::True) return a;
      return ltlf::land(a, b);
    }
    case Op::Or: {
      Formula a = simplify_constants(f.lhs()), b = simplify_constants(f.rhs());
      if (a.op() == Op::True || b.op() == Op::True) return ltlf::top();
      if (a.op() == Op::False) return b;
      if (b.op() == Op::False) return a;
      return ltlf::lor(a, b);
    }
    case Op::Next: {
      // X true still demands a second position
      Formula g = simplify_constants(f.lhs());
      if (g.op() == Op::False) return ltlf::bottom();
      return ltlf::next(g);
    }
    case Op::Until: {
      Formula a = simplify_constants(f.lhs()), b = simplify_constants(f.rhs());
      if (b.is_constant()) return b;
      return ltlf::until(a, b);
    }
    case Op::Eventually:
    case Op::Always: {
      Formula g = simplify_constants(f.lhs());
      if (g.is_constant()) return g;
      return f.op() == Op::Eventually ? ltlf::eventually(g) : ltlf::always(g);
    }
  }
  return f;
}

// LTLf encoding of a query:
//   no constraint   s & F G e
//   stays constant  (s & c) & X (c U e)
//   changes         (s & c) & F !c & F G e
//   changes into    (s & c & !c') & F (!c & c') & F G e
inline Formula to_ltlf(const StructuredQuery& q) {
  using namespace ltlf;
  const Formula s = q.start.to_formula();
  const Formula e = q.end.to_formula();
  Formula out;
  if (!q.constraint) {
    out = land(s, eventually(always(e)));
  } else {
    const Formula c = q.constraint->c.to_formula();
    switch (q.constraint->kind) {
      case ConstraintKind::StaysConstant:
        out = land(land(s, c), next(until(c, e)));
        break;
      case ConstraintKind::Changes:
        out = land(land(land(s, c), eventually(lnot(c))), eventually(always(e)));
        break;
      case ConstraintKind::ChangesInto: {
        if (!q.constraint->c_prime) throw ValidationError("constraint.c_prime", "required for changes_into");
        const Formula cp = q.constraint->c_prime->to_formula();
        out = land(land(land(land(s, c), lnot(cp)), eventually(land(lnot(c), cp))), eventually(always(e)));
        break;
      }
    }
  }
  return simplify_constants(out);
}

inline bool is_lane_predicate(std::string_view name) { return name.rfind("lane-", 0) == 0; }

// Statically unsatisfiable components: two different positive lane literals,
// or a literal together with its negation. Never blocks execution.
inline std::vector<std::string> warn_contradiction(const StructuredQuery& q) {
  std::vector<std::string> warnings;
  auto inspect = [&](const PropFormula& p, const std::string& where) {
    std::vector<std::string> lanes;
    for (const auto& l : p.literals) {
      if (!l.negated && is_lane_predicate(l.predicate) &&
          std::find(lanes.begin(), lanes.end(), l.predicate) == lanes.end()) {
        lanes.push_back(l.predicate);
      }
    }
    if (lanes.size() > 1) {
      std::string joined;
      for (const auto& n : lanes) joined += (joined.empty() ? "" : ", ") + n;
      warnings.push_back(where + ": the agent cannot be in several lanes at once (" + joined + ")");
    }
    for (std::size_t i = 0; i < p.literals.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const auto& a = p.literals[i];
        const auto& b = p.literals[j];
        if (a.predicate == b.predicate && a.negated != b.negated) {
          warnings.push_back(where + ": '" + a.predicate + "' is both required and excluded");
        }
      }
    }
  };
  inspect(q.start, "start");
  inspect(q.end, "end");
  if (q.constraint) {
    inspect(q.constraint->c, "constraint.c");
    if (q.constraint->c_prime) inspect(*q.constraint->c_prime, "constraint.c_prime");
  }
  return warnings;
}

}  // namespace tracequery::query
