#pragma once

// HTTP front end over a read-only library. Handlers are plain functions from
// request data to (status, JSON body) so they can be exercised without a
// socket; serve() wires them into cpp-httplib.
//
// Failures answer {"code", "message", "field"?}: 400 for invalid requests,
// 404 for unknown clips, 422 when a formula exceeds the automaton budget.

#include <httplib.h>

#include <json.hpp>
#include <string>

#include "tracequery/engine/run_query.hpp"
#include "tracequery/error.hpp"
#include "tracequery/query/wire.hpp"
#include "tracequery/store/codec.hpp"
#include "tracequery/store/library.hpp"

namespace tracequery::service {

using json = nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

inline json error_body(const std::string& code, const std::string& message, const std::string& field = {}) {
  json e{{"code", code}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return e;
}

inline json to_json(const engine::Clip& c) {
  json frames = json::array();
  for (const auto& s : c.frames) frames.push_back(store::to_json(s));
  return json{{"clip_id", c.clip_id}, {"trace_id", c.trace_id}, {"k", c.k},
              {"ell", c.ell},         {"length", c.ell - c.k + 1}, {"frames", std::move(frames)}};
}

inline json to_json(const engine::QueryResult& r) {
  json clips = json::array();
  for (const auto& c : r.clips) clips.push_back(to_json(c));
  return json{{"formula", r.formula},
              {"clips", std::move(clips)},
              {"warnings", r.warnings},
              {"continuation", r.continuation ? json(*r.continuation) : json(nullptr)},
              {"sample_seed", r.sample_seed},
              {"total_matches", r.total_matches},
              {"offset", r.offset},
              {"timing", {{"compile_ms", r.timing.compile_ms},
                          {"search_ms", r.timing.search_ms},
                          {"render_ms", r.timing.render_ms}}}};
}

// Parses a POST /api/query body (or the CLI's equivalent) into a request.
inline engine::QueryRequest parse_query_request(const json& body, const store::TraceLibrary& lib) {
  engine::QueryRequest req;
  if (!body.is_object()) throw ValidationError("", "query must be a JSON object");
  auto uint_field = [&](const char* name) -> std::optional<std::uint64_t> {
    if (!body.contains(name) || body[name].is_null()) return std::nullopt;
    if (!body[name].is_number_unsigned()) throw ValidationError(name, "expected a non-negative integer");
    return body[name].get<std::uint64_t>();
  };
  if (body.contains("raw_ltlf") && !body["raw_ltlf"].is_null()) {
    if (!body["raw_ltlf"].is_string()) throw ValidationError("raw_ltlf", "expected a string");
    req.query = body["raw_ltlf"].get<std::string>();
  } else {
    req.query = query::validate(body, lib.vocab().names());
  }
  if (auto v = uint_field("max_results")) req.config.max_results = *v;
  if (auto v = uint_field("min_len")) req.config.min_len = *v;
  if (auto v = uint_field("max_len")) req.config.max_len = *v;
  req.config.sample_seed = uint_field("seed");
  if (body.contains("continuation") && !body["continuation"].is_null()) {
    if (!body["continuation"].is_string()) throw ValidationError("continuation", "expected a string");
    req.continuation = body["continuation"].get<std::string>();
  }
  return req;
}

class ApiService {
 public:
  explicit ApiService(const store::TraceLibrary& lib) : lib_(lib) {}

  Response predicates() const {
    json groups{{"lane", json::array()}, {"relation", json::array()}, {"action", json::array()}};
    for (const auto& d : lib_.vocab().predicates()) groups[std::string(to_string(d.group))].push_back(store::to_json(d));
    return {200, groups};
  }

  Response query(const std::string& body_text) const {
    return guarded([&] {
      json body;
      try {
        body = json::parse(body_text);
      } catch (const json::parse_error& e) {
        return Response{400, error_body("invalid_json", e.what())};
      }
      return Response{200, to_json(engine::run_query(lib_, parse_query_request(body, lib_)))};
    });
  }

  Response clip(const std::string& id) const {
    return guarded([&] { return Response{200, to_json(engine::resolve_clip(lib_, id))}; });
  }

  Response stats() const {
    const auto& s = engine::global_stats();
    auto ms = [](const std::atomic<std::uint64_t>& ns) { return static_cast<double>(ns.load()) / 1e6; };
    return {200, json{{"queries", s.queries.load()},
                      {"find_first_calls", s.find_first_calls.load()},
                      {"letters_fed", s.letters_fed.load()},
                      {"letters_spanned", s.letters_spanned.load()},
                      {"matches", s.matches.load()},
                      {"bound_violations", s.bound_violations.load()},
                      {"timing_ms", {{"compile", ms(s.compile_ns)}, {"search", ms(s.search_ns)}, {"render", ms(s.render_ns)}}},
                      {"cached_automata", automata::default_cache().size()},
                      {"library", {{"episodes", lib_.size()}, {"letters", lib_.total_letters()}}}}};
  }

  Response library() const {
    json eps = json::array();
    for (const auto& ep : lib_.episodes()) {
      auto trig = abstraction::trigger_index(ep);
      eps.push_back({{"id", ep.id},
                     {"seed", ep.seed},
                     {"agent_kind", std::string(to_string(ep.agent_kind))},
                     {"steps", ep.steps.size()},
                     {"trigger_step", trig ? json(*trig + 1) : json(nullptr)}});
    }
    return {200, json{{"episodes", std::move(eps)}, {"config", store::to_json(lib_.config())}}};
  }

 private:
  template <class F>
  static Response guarded(F&& f) {
    try {
      return f();
    } catch (const UnknownPredicate& e) {
      return {400, error_body(e.code(), e.what(), e.field())};
    } catch (const ValidationError& e) {
      return {400, error_body(e.code(), e.what(), e.field())};
    } catch (const ParseError& e) {
      return {400, error_body(e.code(), e.what(), "raw_ltlf")};
    } catch (const NotFound& e) {
      return {404, error_body(e.code(), e.what())};
    } catch (const StateBudgetExceeded& e) {
      return {422, error_body(e.code(), e.what())};
    } catch (const Error& e) {
      return {400, error_body(e.code(), e.what())};
    } catch (const std::exception& e) {
      return {500, error_body("internal", e.what())};
    }
  }

  const store::TraceLibrary& lib_;
};

inline void install_routes(httplib::Server& server, const ApiService& api) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get("/api/predicates", [&api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.predicates()); });
  server.Post("/api/query", [&api, reply](const httplib::Request& req, httplib::Response& res) { reply(res, api.query(req.body)); });
  server.Get("/api/clips/:id", [&api, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.clip(req.path_params.at("id")));
  });
  server.Get("/api/stats", [&api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.stats()); });
  server.Get("/api/library", [&api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.library()); });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_body(res.status == 404 ? "not_found" : "http_error", httplib::status_message(res.status)).dump(),
                      "application/json");
    }
  });
}

// Blocks until the server stops.
inline bool serve(const store::TraceLibrary& lib, const std::string& host, int port) {
  ApiService api(lib);
  httplib::Server server;
  install_routes(server, api);
  return server.listen(host, port);
}

}  // namespace tracequery::service
