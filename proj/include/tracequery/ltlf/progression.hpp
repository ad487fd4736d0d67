#pragma once

// Formula progression: rewriting a formula against one letter into the
// obligation that remains on the rest of the trace.
//
// Residuals are kept in a canonical disjunctive normal form whose literals
// are temporal atoms (a predicate, `X g`, or `g U h`) or their negations.
// Clauses are sorted and deduplicated, contradictory clauses are dropped and
// subsumed clauses are absorbed, so two residuals built along different
// paths compare equal whenever they normalize to the same clause set. Since
// the atoms are drawn from the closure of the source formula, the number of
// distinct residuals is finite.
//
// A residual is interpreted over the *remaining* trace, which may be empty.
// Every positive atom is false on the empty remainder (see accept_at_end),
// which is why `X g` progresses to `g & (true U true)`: the second conjunct
// states that at least one more position exists. It is dropped again when
// the clause already contains another positive literal.

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tracequery/ltlf/formula.hpp"

namespace tracequery::ltlf {

namespace dnf {

struct Literal {
  Formula atom;
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal& a, const Literal& b) {
    if (auto c = a.atom <=> b.atom; c != 0) return c;
    return a.positive <=> b.positive;
  }
};

using Clause = std::vector<Literal>;  // conjunction, sorted
using Dnf = std::vector<Clause>;      // disjunction, sorted; {} is false, {{}} is true

// `true U true`: the remaining trace has at least one position.
inline const Formula& more_atom() {
  static const Formula f = until(top(), top());
  return f;
}

inline Dnf truth() { return Dnf{Clause{}}; }
inline Dnf falsity() { return Dnf{}; }

// Sorts a clause, removes duplicate literals and simplifies it against the
// end-of-trace reading. Returns false when the clause is unsatisfiable.
inline bool tidy_clause(Clause& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  bool other_positive = false;
  bool more_pos = false;
  bool more_neg = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i].atom == c[i + 1].atom) return false;  // p & !p
    if (c[i].atom == more_atom()) {
      (c[i].positive ? more_pos : more_neg) = true;
    } else if (c[i].positive) {
      other_positive = true;
    }
  }
  // A positive atom already forces a nonempty remainder.
  if (more_neg && other_positive) return false;
  if (more_pos && other_positive) {
    std::erase_if(c, [](const Literal& l) { return l.positive && l.atom == more_atom(); });
  }
  return true;
}

inline bool subsumes(const Clause& small, const Clause& big) {
  return small.size() <= big.size() && std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline Dnf tidy(Dnf d) {
  Dnf kept;
  kept.reserve(d.size());
  for (auto& c : d) {
    if (tidy_clause(c)) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Clause& a, const Clause& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  Dnf out;
  for (auto& c : kept) {
    bool absorbed = std::any_of(out.begin(), out.end(), [&](const Clause& s) { return subsumes(s, c); });
    if (!absorbed) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Dnf disjoin(const Dnf& a, const Dnf& b) {
  Dnf out = a;
  out.insert(out.end(), b.begin(), b.end());
  return tidy(std::move(out));
}

inline Dnf conjoin(const Dnf& a, const Dnf& b) {
  Dnf out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Clause c = x;
      c.insert(c.end(), y.begin(), y.end());
      out.push_back(std::move(c));
    }
  }
  return tidy(std::move(out));
}

inline Dnf negate(const Dnf& d) {
  Dnf acc = truth();
  for (const auto& clause : d) {
    Dnf alternatives;
    for (const auto& lit : clause) alternatives.push_back(Clause{Literal{lit.atom, !lit.positive}});
    acc = conjoin(acc, alternatives);
    if (acc.empty()) break;
  }
  return acc;
}

inline Dnf atom(const Formula& a, bool positive = true) {
  Clause c{Literal{a, positive}};
  if (!tidy_clause(c)) return falsity();
  return Dnf{std::move(c)};
}

inline Formula to_formula(const Dnf& d) {
  std::vector<Formula> clauses;
  clauses.reserve(d.size());
  for (const auto& clause : d) {
    std::vector<Formula> lits;
    lits.reserve(clause.size());
    for (const auto& l : clause) lits.push_back(l.positive ? l.atom : lnot(l.atom));
    clauses.push_back(conjunction(lits));
  }
  return disjunction(clauses);
}

Dnf from_formula(const Formula& f);

// Canonical form of `f` as a formula; temporal operands are normalized recursively.
inline Formula canonical(const Formula& f) { return to_formula(from_formula(f)); }

inline Dnf from_formula(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return truth();
    case Op::False:
      return falsity();
    case Op::Pred:
      return atom(f);
    case Op::Not:
      return negate(from_formula(f.lhs()));
    case Op::And:
      return conjoin(from_formula(f.lhs()), from_formula(f.rhs()));
    case Op::Or:
      return disjoin(from_formula(f.lhs()), from_formula(f.rhs()));
    case Op::Next: {
      Formula g = canonical(f.lhs());
      if (g.op() == Op::False) return falsity();
      return atom(next(g));
    }
    case Op::Until: {
      Formula b = canonical(f.rhs());
      if (b.op() == Op::False) return falsity();
      if (b.op() == Op::True) return atom(more_atom());
      return atom(until(canonical(f.lhs()), b));
    }
    case Op::Eventually: {
      Formula b = canonical(f.lhs());
      if (b.op() == Op::False) return falsity();
      return atom(until(top(), b));
    }
    case Op::Always: {
      Formula b = canonical(lnot(f.lhs()));
      if (b.op() == Op::False) return truth();
      return atom(until(top(), b), false);
    }
  }
  return falsity();
}

}  // namespace dnf

// Progression of canonical formulas against letters. Keeps per-instance
// memo tables, so one Progressor should be reused across a compilation.
// Letters are given as a membership predicate to allow projected alphabets.
class Progressor {
 public:
  using Dnf = dnf::Dnf;

  template <class Contains>
  Dnf progress(const Dnf& d, const Contains& contains) {
    Dnf out;
    for (const auto& clause : d) {
      Dnf acc = dnf::truth();
      for (const auto& lit : clause) {
        Dnf step = progress_atom(lit.atom, contains);
        acc = dnf::conjoin(acc, lit.positive ? step : dnf::negate(step));
        if (acc.empty()) break;
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return dnf::tidy(std::move(out));
  }

  const Dnf& dnf_of(const Formula& canonical_formula) {
    auto it = dnf_cache_.find(canonical_formula);
    if (it != dnf_cache_.end()) return it->second;
    return dnf_cache_.emplace(canonical_formula, dnf::from_formula(canonical_formula)).first->second;
  }

 private:
  template <class Contains>
  Dnf progress_atom(const Formula& a, const Contains& contains) {
    switch (a.op()) {
      case Op::Pred:
        return contains(a.name()) ? dnf::truth() : dnf::falsity();
      case Op::Next:
        return dnf::conjoin(dnf_of(a.lhs()), dnf::atom(dnf::more_atom()));
      case Op::Until: {
        // g U h  ->  h' | (g' & (g U h))
        Dnf now = progress(dnf_of(a.rhs()), contains);
        Dnf hold = dnf::conjoin(progress(dnf_of(a.lhs()), contains), dnf::atom(a));
        return dnf::disjoin(now, hold);
      }
      default:
        // canonical forms only carry predicate, next and until atoms
        return dnf_of(a);
    }
  }

  std::unordered_map<Formula, Dnf, FormulaHash> dnf_cache_;
};

// Canonical form: negations on atoms only, F and G expanded, sorted
// deduplicated clauses.
inline Formula normalize(const Formula& f) { return dnf::canonical(f); }

// Residual obligation of `f` after reading `letter`, in canonical form.
inline Formula progress(const Formula& f, const Letter& letter) {
  Progressor p;
  auto contains = [&](const std::string& name) { return letter.contains(name); };
  return dnf::to_formula(p.progress(dnf::from_formula(f), contains));
}

// Is the residual `f` satisfied by the empty remainder of a trace?
// Predicates, `X` and `U` need at least one more position; F and G follow
// their expansions into `U`.
inline bool accept_at_end(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
    case Op::Pred:
    case Op::Next:
    case Op::Until:
    case Op::Eventually:
      return false;
    case Op::Always:
      return true;
    case Op::Not:
      return !accept_at_end(f.lhs());
    case Op::And:
      return accept_at_end(f.lhs()) && accept_at_end(f.rhs());
    case Op::Or:
      return accept_at_end(f.lhs()) || accept_at_end(f.rhs());
  }
  return false;
}

}  // namespace tracequery::ltlf
