#pragma once

// Library-wide querying: search every episode, pool the matches, shuffle them
// with a seeded generator and hand out pages of max_results clips.
//
// Continuation tokens are "<query hash>.<seed>.<offset>" and clip ids are
// "<trace id>:<k>:<ell>", so the server keeps no per-session state.

#include <charconv>
#include <chrono>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tracequery/engine/search.hpp"
#include "tracequery/ltlf/syntax.hpp"
#include "tracequery/query/pattern.hpp"
#include "tracequery/random.hpp"
#include "tracequery/store/library.hpp"

namespace tracequery::engine {

struct QueryRequest {
  std::variant<query::StructuredQuery, std::string> query;  // template or raw LTLf text
  SearchConfig config;
  std::optional<std::string> continuation;
};

struct Clip {
  std::string clip_id;
  std::string trace_id;
  std::size_t k = 0;
  std::size_t ell = 0;
  std::vector<abstraction::Step> frames;  // steps k..ell
};

struct Timing {
  double compile_ms = 0;
  double search_ms = 0;
  double render_ms = 0;
};

struct QueryResult {
  std::string formula;  // the LTLf actually searched
  std::vector<Clip> clips;
  std::vector<std::string> warnings;
  std::optional<std::string> continuation;
  std::uint64_t sample_seed = 0;
  std::size_t total_matches = 0;
  std::size_t offset = 0;
  Timing timing;
};

inline std::string clip_id(const std::string& trace_id, std::size_t k, std::size_t ell) {
  return trace_id + ":" + std::to_string(k) + ":" + std::to_string(ell);
}

namespace detail {

inline bool parse_unsigned(std::string_view s, std::uint64_t& out, int base = 10) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc{} && p == s.data() + s.size();
}

// Identifies what a token was issued for: formula and length bounds.
inline std::string query_hash(const Formula& f, const SearchConfig& cfg) {
  return store::hex64(store::fnv1a(ltlf::to_string(f) + "|" + std::to_string(cfg.min_len) + "|" +
                                   std::to_string(cfg.max_len)));
}

struct Token {
  std::string hash;
  std::uint64_t seed = 0;
  std::uint64_t offset = 0;
};

inline Token parse_token(const std::string& text) {
  auto bad = [] { return ValidationError("continuation", "malformed continuation token"); };
  auto a = text.find('.');
  auto b = text.find('.', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw bad();
  Token t;
  t.hash = text.substr(0, a);
  if (t.hash.size() != 16 || !parse_unsigned(std::string_view(text).substr(a + 1, b - a - 1), t.seed) ||
      !parse_unsigned(std::string_view(text).substr(b + 1), t.offset)) {
    throw bad();
  }
  return t;
}

}  // namespace detail

inline std::string make_token(const std::string& hash, std::uint64_t seed, std::size_t offset) {
  return hash + "." + std::to_string(seed) + "." + std::to_string(offset);
}

// Frames of a clip id against `lib`; NotFound for unknown traces or ranges.
inline Clip resolve_clip(const store::TraceLibrary& lib, const std::string& id) {
  auto second = id.rfind(':');
  auto first = second == std::string::npos || second == 0 ? std::string::npos : id.rfind(':', second - 1);
  std::uint64_t k = 0, ell = 0;
  if (first == std::string::npos || !detail::parse_unsigned(std::string_view(id).substr(first + 1, second - first - 1), k) ||
      !detail::parse_unsigned(std::string_view(id).substr(second + 1), ell)) {
    throw NotFound("no clip '" + id + "'");
  }
  const std::string trace = id.substr(0, first);
  const auto* ep = lib.find(trace);
  if (!ep || k < 1 || k > ell || ell > ep->steps.size()) throw NotFound("no clip '" + id + "'");
  Clip c{id, trace, k, ell, {}};
  c.frames.assign(ep->steps.begin() + static_cast<std::ptrdiff_t>(k - 1),
                  ep->steps.begin() + static_cast<std::ptrdiff_t>(ell));
  return c;
}

// Formula a request searches for; raw text is checked against the vocabulary.
inline Formula request_formula(const QueryRequest& req, const store::TraceLibrary& lib) {
  if (const auto* q = std::get_if<query::StructuredQuery>(&req.query)) return query::to_ltlf(*q);
  try {
    return ltlf::parse(std::get<std::string>(req.query), lib.vocab().names());
  } catch (UnknownPredicate& e) {
    throw UnknownPredicate(e.name(), "raw_ltlf");
  }
}

inline QueryResult run_query(const store::TraceLibrary& lib, const QueryRequest& req,
                             automata::AutomatonCache& cache = automata::default_cache()) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t) {
    return std::chrono::duration<double, std::milli>(clock::now() - t).count();
  };
  req.config.validate();
  if (lib.empty()) throw ValidationError("library", "the trace library is empty");
  global_stats().queries.fetch_add(1, std::memory_order_relaxed);

  QueryResult result;
  if (const auto* q = std::get_if<query::StructuredQuery>(&req.query)) result.warnings = query::warn_contradiction(*q);

  auto t0 = clock::now();
  const Formula f = request_formula(req, lib);
  const CompiledQuery compiled = CompiledQuery::build(f, cache);
  result.formula = ltlf::to_string(f);
  result.timing.compile_ms = ms_since(t0);

  const std::string hash = detail::query_hash(f, req.config);
  std::size_t offset = 0;
  if (req.continuation) {
    auto token = detail::parse_token(*req.continuation);
    if (token.hash != hash) throw ValidationError("continuation", "token was issued for a different query");
    result.sample_seed = token.seed;
    offset = static_cast<std::size_t>(token.offset);
  } else if (req.config.sample_seed) {
    result.sample_seed = *req.config.sample_seed;
  } else {
    // 53 bits survive a round trip through JavaScript numbers
    std::random_device rd;
    result.sample_seed = ((std::uint64_t{rd()} << 32) | rd()) & ((std::uint64_t{1} << 53) - 1);
  }

  t0 = clock::now();
  std::vector<ClipMatch> pool;
  for (std::size_t i = 0; i < lib.size(); ++i) {
    auto found = find_all(lib.letters(i), compiled, req.config, lib.episodes()[i].id);
    pool.insert(pool.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  Rng rng(result.sample_seed);
  shuffle(pool, rng);
  result.timing.search_ms = ms_since(t0);
  global_stats().search_ns.fetch_add(static_cast<std::uint64_t>(result.timing.search_ms * 1e6),
                                     std::memory_order_relaxed);

  t0 = clock::now();
  result.total_matches = pool.size();
  result.offset = std::min(offset, pool.size());
  const std::size_t stop = std::min(pool.size(), result.offset + req.config.max_results);
  for (std::size_t i = result.offset; i < stop; ++i) {
    const auto& m = pool[i];
    result.clips.push_back(resolve_clip(lib, clip_id(m.trace_id, m.k, m.ell)));
  }
  if (stop < pool.size()) result.continuation = make_token(hash, result.sample_seed, stop);
  result.timing.render_ms = ms_since(t0);
  global_stats().render_ns.fetch_add(static_cast<std::uint64_t>(result.timing.render_ms * 1e6),
                                     std::memory_order_relaxed);
  return result;
}

}  // namespace tracequery::engine
