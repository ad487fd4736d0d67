#pragma once

// Seeded generators for property checks: random formulas and traces.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "tracequery/ltlf/formula.hpp"
#include "tracequery/query/pattern.hpp"
#include "tracequery/random.hpp"

namespace tracequery::check {

using ltlf::Formula;
using ltlf::Letter;

// Random formula of at most `depth` operator levels over `predicates`,
// drawing from every operator including the F/G/| sugar.
inline Formula random_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& predicates) {
  if (depth <= 0 || uniform_below(rng, 5) == 0) {
    auto r = uniform_below(rng, predicates.size() + 2);
    if (r == predicates.size()) return ltlf::top();
    if (r == predicates.size() + 1) return ltlf::bottom();
    return ltlf::pred(predicates[r]);
  }
  switch (uniform_below(rng, 9)) {
    case 0:
      return ltlf::lnot(random_formula(rng, depth - 1, predicates));
    case 1:
      return ltlf::land(random_formula(rng, depth - 1, predicates), random_formula(rng, depth - 1, predicates));
    case 2:
      return ltlf::lor(random_formula(rng, depth - 1, predicates), random_formula(rng, depth - 1, predicates));
    case 3:
      return ltlf::next(random_formula(rng, depth - 1, predicates));
    case 4:
    case 5:
      return ltlf::until(random_formula(rng, depth - 1, predicates), random_formula(rng, depth - 1, predicates));
    case 6:
      return ltlf::eventually(random_formula(rng, depth - 1, predicates));
    case 7:
      return ltlf::always(random_formula(rng, depth - 1, predicates));
    default:
      return ltlf::pred(predicates[uniform_below(rng, predicates.size())]);
  }
}

inline Letter random_letter(std::mt19937_64& rng, const std::vector<std::string>& predicates) {
  std::vector<std::string> names;
  for (const auto& p : predicates) {
    if (coin(rng)) names.push_back(p);
  }
  return Letter(std::move(names));
}

// Trace with length uniform in [min_len, max_len].
inline ltlf::AbstractTrace random_trace(std::mt19937_64& rng, const std::vector<std::string>& predicates,
                                        std::size_t min_len, std::size_t max_len) {
  std::size_t n = min_len + uniform_below(rng, max_len - min_len + 1);
  ltlf::AbstractTrace t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back(random_letter(rng, predicates));
  return t;
}

inline ltlf::AbstractTrace mirror(ltlf::AbstractTrace t) {
  std::reverse(t.begin(), t.end());
  return t;
}

// Conjunction of up to `max_literals` distinct predicates, each negated with
// probability `negate`.
inline query::PropFormula random_prop(std::mt19937_64& rng, const std::vector<std::string>& predicates,
                                      std::size_t max_literals, double negate = 0.2) {
  std::vector<std::string> pool = predicates;
  shuffle(pool, rng);
  query::PropFormula p;
  std::size_t n = uniform_below(rng, std::min(max_literals, pool.size()) + 1);
  for (std::size_t i = 0; i < n; ++i) p.literals.push_back({pool[i], coin(rng, negate)});
  return p;
}

// A template query with a nonempty constraint component wherever the kind
// requires one.
inline query::StructuredQuery random_query(std::mt19937_64& rng, const std::vector<std::string>& predicates) {
  query::StructuredQuery q;
  q.start = random_prop(rng, predicates, 2);
  q.end = random_prop(rng, predicates, 2);
  auto nonempty = [&] {
    query::PropFormula p;
    while (p.empty()) p = random_prop(rng, predicates, 2);
    return p;
  };
  switch (uniform_below(rng, 4)) {
    case 0:
      break;
    case 1:
      q.constraint = query::Constraint{query::ConstraintKind::Changes, nonempty(), std::nullopt};
      break;
    case 2:
      q.constraint = query::Constraint{query::ConstraintKind::StaysConstant, nonempty(), std::nullopt};
      break;
    default: {
      auto c = nonempty();
      auto cp = nonempty();
      while (cp.same_literals(c)) cp = nonempty();
      q.constraint = query::Constraint{query::ConstraintKind::ChangesInto, c, cp};
    }
  }
  return q;
}

}  // namespace tracequery::check
