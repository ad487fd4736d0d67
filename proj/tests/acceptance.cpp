// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are the constants below.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "tracequery/check/brute_force.hpp"
#include "tracequery/check/selfcheck.hpp"
#include "tracequery/engine/run_query.hpp"
#include "tracequery/ltlf/evaluate.hpp"
#include "tracequery/ltlf/syntax.hpp"
#include "tracequery/service/http_api.hpp"
#include "tracequery/store/library.hpp"

#ifndef TRACEQUERY_CLI
#error "TRACEQUERY_CLI must name the command-line binary"
#endif

namespace {

using namespace tracequery;
using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

constexpr double kWorkedExamplesSeconds = 1.0;
constexpr std::size_t kOraclePairs = 3000;
constexpr double kOracleSeconds = 30.0;
constexpr std::size_t kReversalPairs = 3000;
constexpr std::size_t kSoundnessQueries = 200;
constexpr std::size_t kBruteForceQueries = 600;
constexpr std::size_t kBruteForceTraceLen = 30;
constexpr std::size_t kScenarioEpisodes = 50;
constexpr std::uint64_t kScenarioSeed = 2023;
constexpr std::size_t kPerfLetters = 100'000;
constexpr double kSearchSeconds = 1.0;
constexpr double kCompileSeconds = 2.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(clock_type::time_point t) {
  return std::chrono::duration<double>(clock_type::now() - t).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

query::PropFormula lits(std::initializer_list<const char*> names) {
  query::PropFormula p;
  for (const char* n : names) {
    std::string s = n;
    bool neg = s[0] == '!';
    p.literals.push_back({neg ? s.substr(1) : s, neg});
  }
  return p;
}

// ---------------------------------------------------------------------------

Verdict worked_examples() {
  auto t0 = clock_type::now();
  const ltlf::AbstractTrace eta1 = {{"lane-1"}, {"lane-1"}, {}};
  const ltlf::AbstractTrace eta2 = {{"lane-1"}, {"lane-1"}, {"lane-1", "behind"}};
  struct Row {
    const char* formula;
    bool on_eta1;
    bool on_eta2;
  };
  // G lane-1 is decided by the formal semantics: eta1 leaves lane 1 in its
  // third frame, so only eta2 satisfies it.
  const Row rows[] = {{"F behind", false, true},
                      {"G lane-1", false, true},
                      {"lane-1 U behind", false, true},
                      {"X lane-1", true, true},
                      {"X X lane-1", false, true}};
  int agree = 0;
  for (const auto& r : rows) {
    auto f = ltlf::parse(r.formula);
    agree += ltlf::evaluate(f, eta1) == r.on_eta1;
    agree += ltlf::evaluate(f, eta2) == r.on_eta2;
  }
  double s = seconds_since(t0);
  return {agree == 10 && s < kWorkedExamplesSeconds,
          std::to_string(agree) + "/10 verdicts, " + fmt(s) + " s (G lane-1 row follows the formal semantics)"};
}

Verdict oracle_equivalence() {
  auto r = check::oracle_equivalence(kOraclePairs, 11);
  return {r.ok() && r.cases >= 1000 && r.seconds < kOracleSeconds,
          std::to_string(r.cases) + " pairs, " + std::to_string(r.failures) + " mismatches, " + fmt(r.seconds) + " s" +
              (r.failures ? ", first: " + r.first_failure : "")};
}

Verdict reversal_law() {
  auto r = check::reversal_law(kReversalPairs, 12);
  return {r.ok() && r.cases >= 1000,
          std::to_string(r.cases) + " pairs, " + std::to_string(r.failures) + " mismatches" +
              (r.failures ? ", first: " + r.first_failure : "")};
}

store::TraceLibrary mixed_library(std::size_t per_kind, int steps, std::uint64_t seed) {
  abstraction::SimConfig cfg;
  cfg.steps = steps;
  store::TraceLibrary lib(cfg);
  std::uint64_t s = seed;
  for (auto kind : {abstraction::AgentKind::Plain, abstraction::AgentKind::TopLane, abstraction::AgentKind::Collision,
                    abstraction::AgentKind::DualTrigger}) {
    for (std::size_t i = 0; i < per_kind; ++i) lib.add(abstraction::simulate(cfg, s++, kind));
  }
  return lib;
}

Verdict soundness() {
  auto lib = mixed_library(5, 200, 300);
  std::mt19937_64 rng(13);
  const auto names = lib.vocab().names_list();
  std::size_t clips = 0, bad = 0;
  for (std::size_t i = 0; i < kSoundnessQueries; ++i) {
    auto f = query::to_ltlf(check::random_query(rng, names));
    auto compiled = engine::CompiledQuery::build(f);
    for (std::size_t t = 0; t < lib.size(); ++t) {
      for (const auto& m : engine::find_all(lib.letters(t), compiled, engine::SearchConfig{})) {
        ++clips;
        bad += !check::window_holds(lib.letters(t), f, m.k, m.ell);
      }
    }
  }
  return {bad == 0 && clips > 0, std::to_string(kSoundnessQueries) + " queries, " + std::to_string(clips) +
                                     " clips, " + std::to_string(clips - bad) + " satisfy the formula"};
}

Verdict brute_force() {
  auto synthetic = check::brute_force_agreement(kBruteForceQueries, 14, kBruteForceTraceLen);
  // and on windows of simulated episodes
  auto lib = mixed_library(10, static_cast<int>(kBruteForceTraceLen), 500);
  std::mt19937_64 rng(15);
  const auto names = lib.vocab().names_list();
  engine::SearchConfig cfg;
  cfg.max_len = kBruteForceTraceLen;
  std::size_t cases = 0, mismatches = 0;
  for (std::size_t i = 0; i < kBruteForceQueries; ++i, ++cases) {
    auto f = query::to_ltlf(check::random_query(rng, names));
    const auto& t = lib.letters(i % lib.size());
    mismatches += engine::find_all(t, f, cfg) != check::brute_force_all(t, f, cfg);
  }
  return {synthetic.ok() && mismatches == 0,
          std::to_string(synthetic.cases + cases) + " (query, trace) cases, " +
              std::to_string(synthetic.failures + mismatches) + " disagreements" +
              (synthetic.failures ? ", first: " + synthetic.first_failure : "")};
}

Verdict golden_patterns() {
  // The template instantiated by hand, then compared with to_ltlf.
  struct Case {
    query::StructuredQuery q;
    const char* expected;
  };
  const Case cases[] = {
      {{lits({"lane-1", "behind"}), lits({"lane-4"}),
        query::Constraint{query::ConstraintKind::Changes, lits({"behind"}), std::nullopt}},
       "((lane-1 & behind) & behind) & F !behind & F G lane-4"},
      {{lits({"lane-1", "behind"}), lits({"lane-4"}),
        query::Constraint{query::ConstraintKind::StaysConstant, lits({"behind"}), std::nullopt}},
       "((lane-1 & behind) & behind) & X (behind U lane-4)"},
      {{lits({"behind"}), lits({"lane-3"}),
        query::Constraint{query::ConstraintKind::ChangesInto, lits({"lane-1"}), lits({"lane-2"})}},
       "(behind & lane-1 & !lane-2) & F (!lane-1 & lane-2) & F G lane-3"},
  };
  int same = 0;
  std::string shown;
  for (const auto& c : cases) {
    auto got = query::to_ltlf(c.q);
    bool ok = got == ltlf::parse(c.expected) && ltlf::to_string(got) == ltlf::to_string(ltlf::parse(c.expected));
    same += ok;
    if (!ok) shown += " got '" + ltlf::to_string(got) + "'";
  }
  return {same == 3, std::to_string(same) + "/3 constraint kinds syntactically identical" + shown};
}

Verdict debugging_scenario() {
  abstraction::SimConfig cfg;
  auto lib = store::generate_library(cfg, kScenarioEpisodes, kScenarioSeed, abstraction::AgentKind::DualTrigger);

  auto all_clips = [](const store::TraceLibrary& l, const query::StructuredQuery& q) {
    engine::QueryRequest req;
    req.query = q;
    req.config.sample_seed = 1;
    req.config.max_results = 1'000'000;
    return engine::run_query(l, req).clips;
  };

  auto main = all_clips(lib, {lits({"lane-2", "above"}), {}, std::nullopt});
  std::size_t main_ok = 0;
  for (const auto& c : main) main_ok += lib.at(c.trace_id).steps[c.k - 1].active_policy == abstraction::PolicyTag::B;

  // Control: the same episodes cut before their trigger step.
  store::TraceLibrary before(cfg);
  for (auto ep : lib.episodes()) {
    if (auto t = abstraction::trigger_index(ep)) ep.steps.resize(*t);
    if (!ep.steps.empty()) before.add(std::move(ep));
  }
  auto control = all_clips(before, {lits({"lane-3", "behind"}), {}, std::nullopt});
  std::size_t control_ok = 0;
  for (const auto& c : control) {
    control_ok += lib.at(c.trace_id).steps[c.k - 1].active_policy == abstraction::PolicyTag::A;
  }
  return {!main.empty() && !control.empty() && main_ok == main.size() && control_ok == control.size(),
          "trigger query: " + std::to_string(main_ok) + "/" + std::to_string(main.size()) +
              " clips start under policy B; control query: " + std::to_string(control_ok) + "/" +
              std::to_string(control.size()) + " clips start under policy A"};
}

// Queries the drop-downs can express, one shape per combination of filled
// slots; names are chosen so that no two slots share a predicate.
std::vector<query::StructuredQuery> interface_shapes() {
  using query::Constraint;
  using query::ConstraintKind;
  const std::vector<query::PropFormula> starts = {{}, lits({"lane-1"}), lits({"behind"}), lits({"lane-1", "behind"})};
  const std::vector<query::PropFormula> ends = {{}, lits({"lane-4"}), lits({"in-front"}), lits({"lane-4", "in-front"})};
  const std::vector<query::PropFormula> cs = {lits({"lane-2"}), lits({"above"})};
  const std::vector<query::PropFormula> cps = {lits({"lane-3"}), lits({"below"})};
  std::vector<query::StructuredQuery> out;
  for (const auto& s : starts) {
    for (const auto& e : ends) {
      out.push_back({s, e, std::nullopt});
      for (const auto& c : cs) {
        out.push_back({s, e, Constraint{ConstraintKind::Changes, c, std::nullopt}});
        out.push_back({s, e, Constraint{ConstraintKind::StaysConstant, c, std::nullopt}});
        for (const auto& cp : cps) out.push_back({s, e, Constraint{ConstraintKind::ChangesInto, c, cp}});
      }
    }
  }
  return out;
}

Verdict performance() {
  abstraction::SimConfig cfg;
  cfg.steps = 200;
  auto lib = store::generate_library(cfg, kPerfLetters / 200, 9000, abstraction::AgentKind::Plain);

  // slowest compile over every shape plus random full queries, fresh cache each
  double worst_compile = 0;
  std::string worst;
  auto shapes = interface_shapes();
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) shapes.push_back(check::random_query(rng, lib.vocab().names_list()));
  for (const auto& q : shapes) {
    automata::AutomatonCache cache;
    auto t0 = clock_type::now();
    engine::CompiledQuery::build(query::to_ltlf(q), cache);
    double s = seconds_since(t0);
    if (s > worst_compile) {
      worst_compile = s;
      worst = ltlf::to_string(query::to_ltlf(q));
    }
  }

  // a selective query and one whose automaton stays live almost everywhere
  const query::StructuredQuery searched[] = {
      {lits({"lane-1", "behind"}), lits({"lane-4"}),
       query::Constraint{query::ConstraintKind::ChangesInto, lits({"lane-1"}), lits({"lane-2"})}},
      {lits({"lane-1"}), lits({"lane-4"}), query::Constraint{query::ConstraintKind::Changes, lits({"lane-1"}), std::nullopt}},
  };
  double search = 0;
  std::size_t found = 0;
  for (const auto& q : searched) {
    auto compiled = engine::CompiledQuery::build(query::to_ltlf(q));
    auto t0 = clock_type::now();
    for (std::size_t t = 0; t < lib.size(); ++t) found += engine::find_all(lib.letters(t), compiled, {}).size();
    search = std::max(search, seconds_since(t0));
  }
  return {lib.total_letters() >= kPerfLetters && search < kSearchSeconds && worst_compile < kCompileSeconds,
          "slowest search over " + std::to_string(lib.total_letters()) + " letters: " + fmt(search) + " s (" +
              std::to_string(found) + " matches); slowest of " + std::to_string(shapes.size()) +
              " compilations: " + fmt(worst_compile) + " s"};
}

std::string run_cli(const std::string& args) {
  std::string cmd = std::string(TRACEQUERY_CLI) + " " + args + " 2>/dev/null";
  std::string out;
  if (FILE* p = popen(cmd.c_str(), "r")) {
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    if (pclose(p) != 0) return {};
  }
  return out;
}

std::vector<std::string> clip_ids(const json& result) {
  std::vector<std::string> out;
  for (const auto& c : result.at("clips")) out.push_back(c.at("clip_id"));
  return out;
}

Verdict persistence() {
  auto dir = std::filesystem::temp_directory_path() / ("tracequery_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto path = (dir / "lib.jsonl").string();

  std::vector<std::string> problems;
  abstraction::SimConfig cfg;
  cfg.steps = 150;
  auto lib = store::generate_library(cfg, 12, 77, abstraction::AgentKind::DualTrigger);
  store::save_library(lib, path);
  auto loaded = store::load_library(path);
  if (!(loaded == lib)) problems.push_back("round trip differs");
  if (!(store::generate_library(cfg, 12, 77, abstraction::AgentKind::DualTrigger) == lib)) {
    problems.push_back("regeneration differs");
  }

  // CLI-generated library equals the in-process one
  const auto cli_path = (dir / "cli.jsonl").string();
  run_cli("generate --episodes 12 --steps 150 --agent dual-trigger --seed 77 --out " + cli_path);
  try {
    if (!(store::load_library(cli_path) == lib)) problems.push_back("CLI generate differs");
  } catch (const std::exception& e) {
    problems.push_back(std::string("CLI generate: ") + e.what());
  }

  // identical (query, seed): CLI vs HTTP API
  service::ApiService api(loaded);
  httplib::Server server;
  service::install_routes(server, api);
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  struct Q {
    const char* cli;
    const char* body;
  };
  const Q queries[] = {
      {"--start lane-2,above --seed 5", R"({"start": ["lane-2", "above"], "seed": 5})"},
      {"--start lane-1 --end lane-4 --seed 6 --max-results 10", R"({"start": ["lane-1"], "end": ["lane-4"], "seed": 6, "max_results": 10})"},
      {"--start behind --constraint-kind changes --c behind --seed 7",
       R"({"start": ["behind"], "constraint": {"kind": "changes", "c": ["behind"]}, "seed": 7})"},
      {"--ltlf \"lane-2 U lane-3\" --seed 8", R"({"raw_ltlf": "lane-2 U lane-3", "seed": 8})"},
  };
  std::size_t compared = 0;
  for (const auto& q : queries) {
    std::string out = run_cli("query --library " + path + " --format structured " + q.cli);
    auto res = client.Post("/api/query", q.body, "application/json");
    try {
      auto cli_ids = clip_ids(json::parse(out));
      if (!res || res->status != 200) {
        problems.push_back(std::string("API failed for ") + q.body);
      } else if (cli_ids != clip_ids(json::parse(res->body))) {
        problems.push_back(std::string("CLI and API differ for ") + q.body);
      } else if (!cli_ids.empty()) {
        ++compared;
      }
    } catch (const std::exception& e) {
      problems.push_back(std::string("CLI output for ") + q.cli + ": " + e.what());
    }
  }
  server.stop();
  loop.join();
  std::filesystem::remove_all(dir);

  std::string detail = "round trip, regeneration, CLI generation; " + std::to_string(compared) +
                       " nonempty queries identical via CLI and API";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty() && compared == std::size(queries), detail};
}

Verdict two_pass_bound() {
  const auto& s = engine::global_stats();
  return {s.find_first_calls > 0 && s.bound_violations == 0,
          std::to_string(s.find_first_calls.load()) + " find_first calls, " + std::to_string(s.bound_violations.load()) +
              " over budget; " + std::to_string(s.letters_fed.load()) + " letters fed for " +
              std::to_string(s.letters_spanned.load()) + " spanned"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  // The feed-bound check reads counters accumulated by every other criterion,
  // so it runs last.
  const Criterion criteria[] = {
      {"worked-examples", worked_examples},
      {"oracle-equivalence", oracle_equivalence},
      {"reversal-law", reversal_law},
      {"search-soundness", soundness},
      {"search-vs-brute-force", brute_force},
      {"pattern-encoding-golden", golden_patterns},
      {"debugging-scenario", debugging_scenario},
      {"performance", performance},
      {"persistence-determinism", persistence},
      {"two-pass-bound", two_pass_bound},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
