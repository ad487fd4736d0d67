#pragma once

// Direct recursive semantics of LTLf on finite nonempty traces.
//
// This evaluator shares no code with progression or the automata and is the
// reference the automaton pipeline is checked against.

#include <span>
#include <stdexcept>
#include <vector>

#include "tracequery/ltlf/formula.hpp"

namespace tracequery::ltlf {

namespace detail {

// Truth value of `f` on every suffix of `trace`: result[i] is the verdict for
// (sigma_i, ..., sigma_k), 0-based. Each subformula is evaluated once per
// position, so the cost is O(|f| * k).
inline std::vector<char> satisfaction_table(const Formula& f, std::span<const Letter> trace) {
  const std::size_t k = trace.size();
  std::vector<char> sat(k, 0);
  switch (f.op()) {
    case Op::True:
      std::fill(sat.begin(), sat.end(), 1);
      break;
    case Op::False:
      break;
    case Op::Pred:
      for (std::size_t i = 0; i < k; ++i) sat[i] = trace[i].contains(f.name());
      break;
    case Op::Not: {
      auto g = satisfaction_table(f.lhs(), trace);
      for (std::size_t i = 0; i < k; ++i) sat[i] = !g[i];
      break;
    }
    case Op::And: {
      auto a = satisfaction_table(f.lhs(), trace);
      auto b = satisfaction_table(f.rhs(), trace);
      for (std::size_t i = 0; i < k; ++i) sat[i] = a[i] && b[i];
      break;
    }
    case Op::Or: {
      auto a = satisfaction_table(f.lhs(), trace);
      auto b = satisfaction_table(f.rhs(), trace);
      for (std::size_t i = 0; i < k; ++i) sat[i] = a[i] || b[i];
      break;
    }
    case Op::Next: {
      // requires a successor position
      auto g = satisfaction_table(f.lhs(), trace);
      for (std::size_t i = 0; i + 1 < k; ++i) sat[i] = g[i + 1];
      break;
    }
    case Op::Until: {
      // exists i >= j with rhs at i and lhs at every position in [j, i)
      auto a = satisfaction_table(f.lhs(), trace);
      auto b = satisfaction_table(f.rhs(), trace);
      bool later = false;
      for (std::size_t i = k; i-- > 0;) {
        later = b[i] || (a[i] && later);
        sat[i] = later;
      }
      break;
    }
    case Op::Eventually: {
      auto g = satisfaction_table(f.lhs(), trace);
      bool later = false;
      for (std::size_t i = k; i-- > 0;) {
        later = later || g[i];
        sat[i] = later;
      }
      break;
    }
    case Op::Always: {
      auto g = satisfaction_table(f.lhs(), trace);
      bool later = true;
      for (std::size_t i = k; i-- > 0;) {
        later = later && g[i];
        sat[i] = later;
      }
      break;
    }
  }
  return sat;
}

}  // namespace detail

// Does `trace` satisfy `f`? Throws std::invalid_argument on an empty trace.
inline bool evaluate(const Formula& f, std::span<const Letter> trace) {
  if (trace.empty()) throw std::invalid_argument("LTLf semantics require a nonempty trace");
  return detail::satisfaction_table(f, trace)[0] != 0;
}

}  // namespace tracequery::ltlf
