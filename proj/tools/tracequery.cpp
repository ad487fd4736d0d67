// tracequery: generate trace libraries, query them, serve the HTTP API.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tracequery/check/selfcheck.hpp"
#include "tracequery/engine/run_query.hpp"
#include "tracequery/service/http_api.hpp"
#include "tracequery/store/codec.hpp"
#include "tracequery/store/library.hpp"

namespace {

using namespace tracequery;
using json = nlohmann::json;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct GenerateArgs {
  std::size_t episodes = 10;
  int steps = 200;
  std::string agent = "plain";
  std::uint64_t seed = 0;
  int lanes = 4;
  int npcs = 6;
  std::string out;
  std::string config;
};

int run_generate(const GenerateArgs& a, CLI::App& cmd) {
  abstraction::SimConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw LibraryError("io_error", "cannot open config '" + a.config + "'", 0);
    cfg = store::sim_config_from_json(json::parse(in));
  }
  // explicit flags win over the config file
  if (cmd.count("--steps") || a.config.empty()) cfg.steps = a.steps;
  if (cmd.count("--lanes") || a.config.empty()) cfg.lanes = a.lanes;
  if (cmd.count("--npcs") || a.config.empty()) cfg.npc_count = a.npcs;
  auto lib = store::generate_library(cfg, a.episodes, a.seed, abstraction::agent_kind_from_string(a.agent));
  store::save_library(lib, a.out);
  std::cerr << "wrote " << lib.size() << " episodes (" << lib.total_letters() << " letters) to " << a.out << "\n";
  return 0;
}

struct QueryArgs {
  std::string library;
  std::string start, end, constraint_kind, c, c_prime, ltlf, continuation;
  std::optional<std::size_t> min_len, max_len, max_results;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
};

// The same JSON body the HTTP API takes, so both shells share one parser.
json request_body(const QueryArgs& a) {
  json body;
  if (!a.ltlf.empty()) {
    body["raw_ltlf"] = a.ltlf;
  } else {
    body["start"] = split_list(a.start);
    body["end"] = split_list(a.end);
    if (!a.constraint_kind.empty()) {
      json c{{"kind", a.constraint_kind}, {"c", split_list(a.c)}};
      if (!a.c_prime.empty()) c["c_prime"] = split_list(a.c_prime);
      body["constraint"] = c;
    } else {
      body["constraint"] = nullptr;
    }
  }
  if (a.min_len) body["min_len"] = *a.min_len;
  if (a.max_len) body["max_len"] = *a.max_len;
  if (a.max_results) body["max_results"] = *a.max_results;
  if (a.seed) body["seed"] = *a.seed;
  if (!a.continuation.empty()) body["continuation"] = a.continuation;
  return body;
}

void print_text(const engine::QueryResult& r) {
  std::cout << "formula: " << r.formula << "\n";
  std::cout << "seed: " << r.sample_seed << "  matches: " << r.total_matches;
  if (!r.clips.empty()) std::cout << "  showing " << r.offset + 1 << "-" << r.offset + r.clips.size();
  std::cout << "\n";
  for (const auto& c : r.clips) {
    std::cout << "\nclip " << c.clip_id << "  trace " << c.trace_id << "  k=" << c.k << " ell=" << c.ell
              << "  length " << c.ell - c.k + 1 << "\n";
    for (std::size_t i = 0; i < c.frames.size(); ++i) {
      const auto& s = c.frames[i];
      std::cout << "  " << c.k + i << "  [" << to_string(s.active_policy) << "]";
      for (const auto& name : s.letter) std::cout << " " << name;
      std::cout << "\n";
    }
  }
  if (r.continuation) std::cout << "\ncontinuation: " << *r.continuation << "\n";
}

int run_query_command(const QueryArgs& a) {
  auto lib = store::load_library(a.library);
  auto req = service::parse_query_request(request_body(a), lib);
  auto result = engine::run_query(lib, req);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (a.format == "structured") {
    std::cout << service::to_json(result).dump(2) << "\n";
  } else {
    print_text(result);
  }
  return 0;
}

int selfcheck(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : check::run_selfcheck(seed)) {
    std::cout << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, " << r.failures
              << " failures, " << r.seconds << " s\n";
    if (!r.ok()) std::cout << "  first failure: " << r.first_failure << "\n";
    ok = ok && r.ok();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal queries over agent traces"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "simulate episodes and save a trace library");
  g->add_option("--episodes", gen.episodes, "number of episodes")->capture_default_str();
  g->add_option("--steps", gen.steps, "steps per episode")->capture_default_str();
  g->add_option("--agent", gen.agent, "plain | toplane | collision | dual-trigger")
      ->capture_default_str()
      ->check(CLI::IsMember({"plain", "toplane", "collision", "dual-trigger"}));
  g->add_option("--seed", gen.seed, "seed of the first episode")->capture_default_str();
  g->add_option("--lanes", gen.lanes, "number of lanes")->capture_default_str();
  g->add_option("--npcs", gen.npcs, "other cars on the road")->capture_default_str();
  g->add_option("--out", gen.out, "library file to write")->required();
  g->add_option("--config", gen.config, "JSON simulator config; flags given explicitly override it");

  QueryArgs q;
  auto* qc = app.add_subcommand("query", "search a library");
  qc->add_option("--library", q.library, "library file")->required();
  qc->add_option("--start", q.start, "start literals, comma separated; prefix ! to negate");
  qc->add_option("--end", q.end, "end literals");
  qc->add_option("--constraint-kind", q.constraint_kind, "changes | stays_constant | changes_into");
  qc->add_option("--c", q.c, "constraint literals");
  qc->add_option("--c-prime", q.c_prime, "target literals for changes_into");
  qc->add_option("--ltlf", q.ltlf, "raw LTLf formula instead of the template");
  qc->add_option("--min-len", q.min_len, "shortest clip (default 1)");
  qc->add_option("--max-len", q.max_len, "longest clip (default 60)");
  qc->add_option("--max-results", q.max_results, "clips per page (default 4)");
  qc->add_option("--seed", q.seed, "sampling seed");
  qc->add_option("--continuation", q.continuation, "token from a previous page");
  qc->add_option("--format", q.format, "text | structured")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "structured"}));

  std::string serve_library;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* sc = app.add_subcommand("serve", "serve the HTTP API");
  sc->add_option("--library", serve_library, "library file")->required();
  sc->add_option("--port", port, "port")->capture_default_str();
  sc->add_option("--host", host, "bind address")->capture_default_str();

  std::uint64_t check_seed = 1;
  auto* ck = app.add_subcommand("selfcheck", "run the randomized oracle suites");
  ck->add_option("--seed", check_seed, "seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen, *g);
    if (*qc) return run_query_command(q);
    if (*sc) {
      auto lib = store::load_library(serve_library);
      std::cerr << "serving " << lib.size() << " episodes on http://" << host << ":" << port << "\n";
      return service::serve(lib, host, port) ? 0 : 1;
    }
    if (*ck) return selfcheck(check_seed);
  } catch (const UnknownPredicate& e) {
    std::cerr << "error: " << (e.field().empty() ? "" : e.field() + ": ") << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
