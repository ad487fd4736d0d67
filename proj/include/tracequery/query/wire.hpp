#pragma once

// JSON representation of structured queries, as exchanged with the UI.
//
//   {
//     "start":      ["lane-1", "behind"],          literals, "!" negates
//     "end":        ["lane-4"],
//     "constraint": {"kind": "changes_into", "c": ["lane-1"], "c_prime": ["lane-2"]} | null
//   }

#include <json.hpp>
#include <set>
#include <string>

#include "tracequery/error.hpp"
#include "tracequery/query/pattern.hpp"

namespace tracequery::query {

using json = nlohmann::json;

inline std::string to_wire(const PredicateLiteral& l) { return (l.negated ? "!" : "") + l.predicate; }

inline json to_json(const PropFormula& p) {
  json out = json::array();
  for (const auto& l : p.literals) out.push_back(to_wire(l));
  return out;
}

inline json to_json(const StructuredQuery& q) {
  json out;
  out["start"] = to_json(q.start);
  out["end"] = to_json(q.end);
  if (q.constraint) {
    json c;
    c["kind"] = std::string(to_string(q.constraint->kind));
    c["c"] = to_json(q.constraint->c);
    if (q.constraint->c_prime) c["c_prime"] = to_json(*q.constraint->c_prime);
    out["constraint"] = c;
  } else {
    out["constraint"] = nullptr;
  }
  return out;
}

namespace detail {

inline PredicateLiteral parse_literal(const json& j, const std::string& field, const std::set<std::string>& vocab) {
  if (!j.is_string()) throw ValidationError(field, "expected a predicate name string");
  std::string text = j.get<std::string>();
  PredicateLiteral lit;
  if (!text.empty() && text.front() == '!') {
    lit.negated = true;
    text.erase(0, 1);
  }
  if (text.empty()) throw ValidationError(field, "empty predicate name");
  if (!vocab.contains(text)) throw UnknownPredicate(text, field);
  lit.predicate = std::move(text);
  return lit;
}

inline PropFormula parse_prop(const json& j, const std::string& field, const std::set<std::string>& vocab) {
  PropFormula p;
  if (j.is_null()) return p;
  if (!j.is_array()) throw ValidationError(field, "expected an array of literals");
  for (std::size_t i = 0; i < j.size(); ++i) {
    p.literals.push_back(parse_literal(j[i], field + "[" + std::to_string(i) + "]", vocab));
  }
  return p;
}

}  // namespace detail

// Schema-checks the start/end/constraint part of a request body and resolves
// predicate names against `vocab`. Other keys are ignored here.
inline StructuredQuery validate(const json& body, const std::set<std::string>& vocab) {
  if (!body.is_object()) throw ValidationError("", "query must be a JSON object");
  StructuredQuery q;
  if (body.contains("start")) q.start = detail::parse_prop(body["start"], "start", vocab);
  if (body.contains("end")) q.end = detail::parse_prop(body["end"], "end", vocab);
  if (body.contains("constraint") && !body["constraint"].is_null()) {
    const json& c = body["constraint"];
    if (!c.is_object()) throw ValidationError("constraint", "expected an object or null");
    if (!c.contains("kind") || !c["kind"].is_string()) {
      throw ValidationError("constraint.kind", "required string: changes, stays_constant or changes_into");
    }
    auto kind = constraint_kind_from_string(c["kind"].get<std::string>());
    if (!kind) throw ValidationError("constraint.kind", "unknown constraint kind '" + c["kind"].get<std::string>() + "'");
    Constraint con;
    con.kind = *kind;
    if (!c.contains("c")) throw ValidationError("constraint.c", "required");
    con.c = detail::parse_prop(c["c"], "constraint.c", vocab);
    if (con.c.empty()) throw ValidationError("constraint.c", "must not be empty");
    const bool has_prime = c.contains("c_prime") && !c["c_prime"].is_null();
    if (*kind == ConstraintKind::ChangesInto) {
      if (!has_prime) throw ValidationError("constraint.c_prime", "required for changes_into");
      con.c_prime = detail::parse_prop(c["c_prime"], "constraint.c_prime", vocab);
      if (con.c_prime->empty()) throw ValidationError("constraint.c_prime", "must not be empty");
      if (con.c.same_literals(*con.c_prime)) throw ValidationError("constraint.c_prime", "must differ from c");
    } else if (has_prime) {
      throw ValidationError("constraint.c_prime", "only allowed for changes_into");
    }
    q.constraint = std::move(con);
  }
  return q;
}

}  // namespace tracequery::query
