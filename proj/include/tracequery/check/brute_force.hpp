#pragma once

// Reference search: evaluate() over every window, with the same restart and
// length-bound rules as the automaton search. Cubic; small traces only.

#include <optional>
#include <span>
#include <vector>

#include "tracequery/engine/search.hpp"
#include "tracequery/ltlf/evaluate.hpp"

namespace tracequery::check {

inline bool window_holds(std::span<const ltlf::Letter> trace, const ltlf::Formula& f, std::size_t k, std::size_t ell) {
  return ltlf::evaluate(f, trace.subspan(k - 1, ell - k + 1));
}

inline std::optional<engine::ClipMatch> brute_force_first(std::span<const ltlf::Letter> trace, const ltlf::Formula& f,
                                                          std::size_t from, const engine::SearchConfig& cfg) {
  std::size_t segment = from;
  while (segment <= trace.size()) {
    std::optional<std::size_t> ell;
    for (std::size_t e = segment; e <= trace.size() && !ell; ++e) {
      for (std::size_t k = segment; k <= e; ++k) {
        if (window_holds(trace, f, k, e)) {
          ell = e;
          break;
        }
      }
    }
    if (!ell) return std::nullopt;
    for (std::size_t k = *ell; k >= segment; --k) {
      const std::size_t length = *ell - k + 1;
      if (length > cfg.max_len) break;
      if (length >= cfg.min_len && window_holds(trace, f, k, *ell)) return engine::ClipMatch{{}, k, *ell};
    }
    segment = *ell + 1;
  }
  return std::nullopt;
}

inline std::vector<engine::ClipMatch> brute_force_all(std::span<const ltlf::Letter> trace, const ltlf::Formula& f,
                                                      const engine::SearchConfig& cfg) {
  std::vector<engine::ClipMatch> out;
  std::size_t from = 1;
  while (from <= trace.size()) {
    auto m = brute_force_first(trace, f, from, cfg);
    if (!m) break;
    from = m->ell + 1;
    out.push_back(*m);
  }
  return out;
}

}  // namespace tracequery::check
