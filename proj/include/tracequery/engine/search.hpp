#pragma once

// Two-pass subtrace search. Indices are 1-based and inclusive throughout.
//
// Pass 1 runs the automaton for F f forward from `from`; the first accepting
// position ell is the earliest end of any satisfying window. Pass 2 runs the
// reversed automaton of f backward from ell; each accepting position k marks a
// window k..ell satisfying f, and the first admissible one (largest k) wins.

#include <atomic>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracequery/automata/automaton.hpp"
#include "tracequery/automata/cache.hpp"
#include "tracequery/error.hpp"
#include "tracequery/ltlf/formula.hpp"

namespace tracequery::engine {

using ltlf::Formula;
using ltlf::Letter;

struct ClipMatch {
  std::string trace_id;
  std::size_t k = 0;
  std::size_t ell = 0;

  std::size_t length() const noexcept { return ell - k + 1; }

  friend bool operator==(const ClipMatch&, const ClipMatch&) = default;
};

struct SearchConfig {
  // Shortest admissible clip. A start-only query matches single letters, so a
  // larger default would hide all of its matches.
  std::size_t min_len = 1;
  std::size_t max_len = 60;
  std::size_t max_results = 4;
  std::optional<std::uint64_t> sample_seed;

  void validate() const {
    if (min_len < 1) throw ValidationError("min_len", "must be at least 1");
    if (max_len < min_len) throw ValidationError("max_len", "must be at least min_len");
    if (max_results < 1) throw ValidationError("max_results", "must be at least 1");
  }
};

// Counters for one find_first call.
struct SearchCounters {
  std::size_t pass1_fed = 0;
  std::size_t pass2_fed = 0;
  std::size_t spanned = 0;  // letters from `from` to the last index touched

  std::size_t fed() const noexcept { return pass1_fed + pass2_fed; }
};

// Process-wide totals, exported by the stats endpoint.
struct SearchStats {
  std::atomic<std::uint64_t> queries{0};
  std::atomic<std::uint64_t> find_first_calls{0};
  std::atomic<std::uint64_t> letters_fed{0};
  std::atomic<std::uint64_t> letters_spanned{0};
  std::atomic<std::uint64_t> matches{0};
  std::atomic<std::uint64_t> bound_violations{0};  // fed > 2 * spanned; should stay 0
  std::atomic<std::uint64_t> compile_ns{0};
  std::atomic<std::uint64_t> search_ns{0};
  std::atomic<std::uint64_t> render_ns{0};

  void record(const SearchCounters& c, bool matched) {
    find_first_calls.fetch_add(1, std::memory_order_relaxed);
    letters_fed.fetch_add(c.fed(), std::memory_order_relaxed);
    letters_spanned.fetch_add(c.spanned, std::memory_order_relaxed);
    if (matched) matches.fetch_add(1, std::memory_order_relaxed);
    if (c.fed() > 2 * c.spanned) bound_violations.fetch_add(1, std::memory_order_relaxed);
  }

  void reset() {
    for (auto* a : {&queries, &find_first_calls, &letters_fed, &letters_spanned, &matches, &bound_violations,
                    &compile_ns, &search_ns, &render_ns}) {
      a->store(0);
    }
  }
};

inline SearchStats& global_stats() {
  static SearchStats stats;
  return stats;
}

// The two automata a search needs.
struct CompiledQuery {
  Formula formula;
  std::shared_ptr<const automata::SymbolicAutomaton> forward;   // compile(F f)
  std::shared_ptr<const automata::SymbolicAutomaton> backward;  // reverse(compile(f))

  static CompiledQuery build(const Formula& f, automata::AutomatonCache& cache = automata::default_cache()) {
    const auto start = std::chrono::steady_clock::now();
    CompiledQuery q{f, cache.forward(ltlf::eventually(f)), cache.reversed(f)};
    global_stats().compile_ns.fetch_add(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count(),
        std::memory_order_relaxed);
    return q;
  }
};

inline std::optional<ClipMatch> find_first(std::span<const Letter> trace, const CompiledQuery& q, std::size_t from,
                                           const SearchConfig& cfg, SearchCounters* counters = nullptr) {
  if (from < 1 || from > trace.size()) throw std::out_of_range("find_first: start index outside the trace");
  SearchCounters local;
  SearchCounters& c = counters ? *counters : local;
  c = {};
  const auto& fwd = *q.forward;
  const auto& bwd = *q.backward;
  std::vector<automata::StateId> scratch;
  std::optional<ClipMatch> found;

  std::size_t segment = from;
  while (segment <= trace.size() && !found) {
    // Pass 1
    automata::StateSet states = fwd.initial();
    std::size_t ell = 0;
    for (std::size_t i = segment; i <= trace.size(); ++i) {
      fwd.step_into(states, fwd.project(trace[i - 1]), scratch);
      states = automata::StateSet(scratch);
      ++c.pass1_fed;
      if (fwd.is_accepting(states)) {
        ell = i;
        break;
      }
      if (states.empty()) break;
    }
    if (ell == 0) {
      c.spanned = trace.size() - from + 1;
      break;
    }
    c.spanned = ell - from + 1;

    // Pass 2, bounded below by the segment start
    states = bwd.initial();
    for (std::size_t k = ell; k >= segment; --k) {
      const std::size_t length = ell - k + 1;
      if (length > cfg.max_len) break;
      bwd.step_into(states, bwd.project(trace[k - 1]), scratch);
      states = automata::StateSet(scratch);
      ++c.pass2_fed;
      if (states.empty()) break;
      if (length >= cfg.min_len && bwd.is_accepting(states)) {
        found = ClipMatch{{}, k, ell};
        break;
      }
    }
    segment = ell + 1;
  }
  global_stats().record(c, found.has_value());
  return found;
}

inline std::optional<ClipMatch> find_first(std::span<const Letter> trace, const Formula& f, std::size_t from,
                                           const SearchConfig& cfg, SearchCounters* counters = nullptr) {
  return find_first(trace, CompiledQuery::build(f), from, cfg, counters);
}

inline std::vector<ClipMatch> find_all(std::span<const Letter> trace, const CompiledQuery& q, const SearchConfig& cfg,
                                       const std::string& trace_id = {}) {
  std::vector<ClipMatch> out;
  std::size_t from = 1;
  while (from <= trace.size()) {
    auto m = find_first(trace, q, from, cfg);
    if (!m) break;
    m->trace_id = trace_id;
    from = m->ell + 1;
    out.push_back(std::move(*m));
  }
  return out;
}

inline std::vector<ClipMatch> find_all(std::span<const Letter> trace, const Formula& f, const SearchConfig& cfg,
                                       const std::string& trace_id = {}) {
  return find_all(trace, CompiledQuery::build(f), cfg, trace_id);
}

}  // namespace tracequery::engine
