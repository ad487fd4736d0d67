#pragma once

// Randomized cross-checks between independent implementations, shared by the
// `selfcheck` command and the acceptance binary.

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

#include "tracequery/automata/automaton.hpp"
#include "tracequery/check/brute_force.hpp"
#include "tracequery/check/generators.hpp"
#include "tracequery/engine/search.hpp"
#include "tracequery/ltlf/evaluate.hpp"
#include "tracequery/ltlf/syntax.hpp"
#include "tracequery/query/pattern.hpp"

namespace tracequery::check {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double seconds = 0;
  std::string first_failure;

  bool ok() const noexcept { return failures == 0 && cases > 0; }

  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

namespace detail {

inline std::string show(const ltlf::AbstractTrace& t) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << (i ? ", " : "") << "{";
    for (std::size_t j = 0; j < t[i].names().size(); ++j) os << (j ? "," : "") << t[i].names()[j];
    os << "}";
  }
  os << "]";
  return os.str();
}

template <class F>
SuiteResult timed(std::string name, F&& body) {
  SuiteResult r;
  r.name = std::move(name);
  auto t0 = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

// compile(f) accepts w  <=>  evaluate(f, w).
inline SuiteResult oracle_equivalence(std::size_t pairs, std::uint64_t seed) {
  return detail::timed("oracle-equivalence", [&](SuiteResult& r) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> preds = {"a", "b", "c"};
    while (r.cases < pairs) {
      Formula f = random_formula(rng, 4, preds);
      auto a = automata::compile(f);
      for (int i = 0; i < 4 && r.cases < pairs; ++i, ++r.cases) {
        auto w = random_trace(rng, preds, 1, 8);
        if (a.accepts(w) != ltlf::evaluate(f, w)) r.fail(ltlf::to_string(f) + " on " + detail::show(w));
      }
    }
  });
}

// reverse(A) accepts w  <=>  A accepts mirror(w).
inline SuiteResult reversal_law(std::size_t pairs, std::uint64_t seed) {
  return detail::timed("reversal-law", [&](SuiteResult& r) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> preds = {"a", "b", "c"};
    while (r.cases < pairs) {
      Formula f = random_formula(rng, 4, preds);
      auto a = automata::compile(f);
      auto rev = automata::reverse(a);
      for (int i = 0; i < 4 && r.cases < pairs; ++i, ++r.cases) {
        auto w = random_trace(rng, preds, 1, 8);
        if (rev.accepts(w) != a.accepts(mirror(w))) r.fail(ltlf::to_string(f) + " on " + detail::show(w));
      }
    }
  });
}

// find_all against the window oracle on random pattern queries. Also checks
// soundness of every match and the per-call feed bound.
inline SuiteResult brute_force_agreement(std::size_t queries, std::uint64_t seed, std::size_t max_trace = 30) {
  return detail::timed("brute-force-agreement", [&](SuiteResult& r) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> preds = {"lane-1", "lane-2", "lane-3", "behind", "above", "action-left"};
    engine::SearchConfig cfg;
    cfg.min_len = 1;
    cfg.max_len = max_trace;
    for (; r.cases < queries; ++r.cases) {
      Formula f = query::to_ltlf(random_query(rng, preds));
      auto compiled = engine::CompiledQuery::build(f);
      auto t = random_trace(rng, preds, 1, max_trace);
      auto got = engine::find_all(t, compiled, cfg);
      auto want = brute_force_all(t, f, cfg);
      if (got != want) {
        r.fail(ltlf::to_string(f) + " on " + detail::show(t));
        continue;
      }
      std::size_t from = 1;
      for (const auto& m : got) {
        engine::SearchCounters c;
        engine::find_first(t, compiled, from, cfg, &c);
        if (c.fed() > 2 * c.spanned) r.fail("feed bound exceeded for " + ltlf::to_string(f));
        if (!window_holds(t, f, m.k, m.ell)) r.fail("unsound match for " + ltlf::to_string(f));
        from = m.ell + 1;
      }
    }
  });
}

inline std::vector<SuiteResult> run_selfcheck(std::uint64_t seed = 1) {
  return {oracle_equivalence(2000, seed), reversal_law(2000, seed + 1), brute_force_agreement(500, seed + 2)};
}

}  // namespace tracequery::check
