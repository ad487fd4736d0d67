#pragma once

// Client-side model of the query builder: drop-down selections, the request
// body they produce, and a playback cursor over a returned clip. The browser
// front end mirrors these; keeping them here pins the mapping in tests.

#include <algorithm>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tracequery/query/pattern.hpp"

namespace tracequery::ui {

using json = nlohmann::json;

// An empty optional is the "any" entry of a drop-down.
struct FrameSelection {
  std::optional<std::string> lane;
  std::vector<std::string> relations;
};

struct QueryFormState {
  FrameSelection start;
  FrameSelection end;
  std::optional<query::ConstraintKind> kind;  // none selected: no constraint
  std::optional<std::string> c;
  std::optional<std::string> c_prime;  // shown for changes_into only
};

namespace detail {

inline json literals(const FrameSelection& s) {
  json out = json::array();
  if (s.lane) out.push_back(*s.lane);
  for (const auto& r : s.relations) out.push_back(r);
  return out;
}

}  // namespace detail

// Wire body for POST /api/query. An incomplete constraint is dropped rather
// than sent, so the form can only produce requests the API accepts.
inline json build_request(const QueryFormState& form) {
  json body{{"start", detail::literals(form.start)}, {"end", detail::literals(form.end)}, {"constraint", nullptr}};
  if (form.kind && form.c) {
    json c{{"kind", std::string(query::to_string(*form.kind))}, {"c", json::array({*form.c})}};
    if (*form.kind == query::ConstraintKind::ChangesInto) {
      if (!form.c_prime || *form.c_prime == *form.c) return body;
      c["c_prime"] = json::array({*form.c_prime});
    }
    body["constraint"] = std::move(c);
  }
  return body;
}

// Playback position over frames k..ell (1-based, inclusive).
class ClipView {
 public:
  ClipView(std::size_t k, std::size_t ell) : k_(k), ell_(std::max(k, ell)), cursor_(k) {}

  std::size_t cursor() const noexcept { return cursor_; }
  void seek(std::size_t index) { cursor_ = std::clamp(index, k_, ell_); }
  void advance() { seek(cursor_ + 1); }
  bool at_end() const noexcept { return cursor_ == ell_; }
  std::size_t frame_offset() const noexcept { return cursor_ - k_; }

 private:
  std::size_t k_;
  std::size_t ell_;
  std::size_t cursor_;
};

}  // namespace tracequery::ui
