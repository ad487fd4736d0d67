#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tracequery/engine/run_query.hpp"
#include "tracequery/ltlf/evaluate.hpp"
#include "tracequery/store/library.hpp"

namespace {

using namespace tracequery;
using namespace tracequery::store;
using abstraction::AgentKind;
using engine::QueryRequest;
using engine::run_query;

abstraction::SimConfig small_config() {
  abstraction::SimConfig cfg;
  cfg.steps = 80;
  return cfg;
}

const TraceLibrary& dual_library() {
  static const TraceLibrary lib = generate_library(small_config(), 12, 1, AgentKind::DualTrigger);
  return lib;
}

std::string round_trip_text(const TraceLibrary& lib) {
  std::ostringstream out;
  write_library(lib, out);
  return out.str();
}

TraceLibrary read_text(const std::string& text) {
  std::istringstream in(text);
  return read_library(in);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

query::PropFormula lits(std::initializer_list<const char*> names) {
  query::PropFormula p;
  for (const char* n : names) p.literals.push_back({n, false});
  return p;
}

TEST(Library, SaveLoadRoundTrip) {
  const auto& lib = dual_library();
  auto path = std::filesystem::temp_directory_path() / "tracequery_roundtrip.jsonl";
  save_library(lib, path.string());
  TraceLibrary loaded = load_library(path.string());
  EXPECT_EQ(loaded, lib);
  EXPECT_EQ(loaded.seeds(), lib.seeds());
  // and the bytes are stable
  EXPECT_EQ(round_trip_text(loaded), round_trip_text(lib));
  std::filesystem::remove(path);
}

TEST(Library, RegenerationIsDeterministic) {
  EXPECT_EQ(generate_library(small_config(), 12, 1, AgentKind::DualTrigger), dual_library());
  EXPECT_FALSE(generate_library(small_config(), 12, 2, AgentKind::DualTrigger) == dual_library());
}

TEST(Library, LookupAndDuplicates) {
  TraceLibrary lib = dual_library();
  const auto& first = lib.episodes().front();
  EXPECT_EQ(&lib.at(first.id), lib.find(first.id));
  EXPECT_THROW(lib.at("nope"), NotFound);
  EXPECT_THROW(lib.add(first), ValidationError);
  EXPECT_EQ(lib.total_letters(), 12u * 80u);
}

TEST(Library, ForeignPredicateRejectedOnAdd) {
  TraceLibrary lib(small_config());
  auto ep = abstraction::simulate(small_config(), 3, AgentKind::Plain);
  ep.steps[4].letter = ltlf::Letter{"lane-1", "tailgating"};
  EXPECT_THROW(lib.add(ep), ValidationError);
}

TEST(LibraryFile, UnknownVersion) {
  auto lines = lines_of(round_trip_text(dual_library()));
  auto header = json::parse(lines[0]);
  header["version"] = 7;
  lines[0] = header.dump();
  try {
    read_text(join(lines));
    FAIL();
  } catch (const LibraryError& e) {
    EXPECT_EQ(e.code(), "version_mismatch");
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LibraryFile, LetterOutsideHeaderVocab) {
  auto lines = lines_of(round_trip_text(dual_library()));
  auto rec = json::parse(lines[3]);
  rec.erase("checksum");
  rec["steps"][0]["letter"].push_back("lane-9");
  rec["checksum"] = hex64(fnv1a(rec.dump()));
  lines[3] = rec.dump();
  try {
    read_text(join(lines));
    FAIL();
  } catch (const LibraryError& e) {
    EXPECT_EQ(e.code(), "schema_error");
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("lane-9"), std::string::npos);
  }
}

TEST(LibraryFile, HeaderVocabMustMatchConfig) {
  auto lines = lines_of(round_trip_text(dual_library()));
  auto header = json::parse(lines[0]);
  header["vocab"].erase(header["vocab"].begin());
  lines[0] = header.dump();
  EXPECT_THROW(read_text(join(lines)), LibraryError);
}

TEST(LibraryFile, TamperedRecordFailsChecksum) {
  auto lines = lines_of(round_trip_text(dual_library()));
  auto pos = lines[2].find("\"x\":");
  ASSERT_NE(pos, std::string::npos);
  lines[2].insert(pos + 4, "1");
  try {
    read_text(join(lines));
    FAIL();
  } catch (const LibraryError& e) {
    EXPECT_EQ(e.code(), "checksum_mismatch");
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LibraryFile, StructuralProblemsCarryLineNumbers) {
  auto lines = lines_of(round_trip_text(dual_library()));
  auto expect_schema = [](const std::string& text, std::size_t line) {
    try {
      read_text(text);
      FAIL() << "accepted";
    } catch (const LibraryError& e) {
      EXPECT_EQ(e.code(), "schema_error");
      EXPECT_EQ(e.line(), line);
    }
  };
  expect_schema("", 1);
  expect_schema("{not json\n", 1);
  expect_schema(join({lines[0], "[1,2]"}), 2);
  auto truncated = lines;
  truncated.pop_back();
  expect_schema(join(truncated), truncated.size());
  auto missing = json::parse(lines[1]);
  missing.erase("checksum");
  missing.erase("steps");
  missing["checksum"] = hex64(fnv1a(missing.dump()));
  expect_schema(join({lines[0], missing.dump()}), 2);
}

TEST(LibraryFile, MissingFile) {
  try {
    load_library("/nonexistent/dir/lib.jsonl");
    FAIL();
  } catch (const LibraryError& e) {
    EXPECT_EQ(e.code(), "io_error");
  }
}

QueryRequest structured(query::StructuredQuery q, std::optional<std::uint64_t> seed = 11) {
  QueryRequest r;
  r.query = std::move(q);
  r.config.sample_seed = seed;
  return r;
}

TEST(RunQuery, StartDescriptionHoldsOnTheFirstFrame) {
  auto res = run_query(dual_library(), structured({lits({"lane-2", "above"}), {}, std::nullopt}));
  ASSERT_FALSE(res.clips.empty());
  EXPECT_LE(res.clips.size(), 4u);
  for (const auto& c : res.clips) {
    EXPECT_TRUE(c.frames.front().letter.contains("lane-2"));
    EXPECT_TRUE(c.frames.front().letter.contains("above"));
    EXPECT_EQ(c.frames.size(), c.ell - c.k + 1);
  }
}

TEST(RunQuery, SameSeedSameClips) {
  auto ids = [](const engine::QueryResult& r) {
    std::vector<std::string> out;
    for (const auto& c : r.clips) out.push_back(c.clip_id);
    return out;
  };
  auto q = structured({lits({"lane-2"}), lits({"lane-3"}), std::nullopt}, 99);
  auto a = run_query(dual_library(), q);
  auto b = run_query(dual_library(), q);
  EXPECT_EQ(ids(a), ids(b));
  EXPECT_EQ(a.sample_seed, 99u);
  // a loaded copy answers identically
  EXPECT_EQ(ids(run_query(read_text(round_trip_text(dual_library())), q)), ids(a));
}

TEST(RunQuery, ContradictionGivesEmptyResultAndWarning) {
  auto res = run_query(dual_library(), structured({lits({"lane-1", "lane-2"}), {}, std::nullopt}));
  EXPECT_TRUE(res.clips.empty());
  EXPECT_EQ(res.total_matches, 0u);
  ASSERT_EQ(res.warnings.size(), 1u);
  EXPECT_FALSE(res.continuation);
}

TEST(RunQuery, PagesAreDisjointAndCoverThePool) {
  auto req = structured({lits({"behind"}), {}, std::nullopt}, 5);
  auto page = run_query(dual_library(), req);
  ASSERT_GT(page.total_matches, 8u);
  std::set<std::string> seen;
  std::size_t pages = 0;
  while (true) {
    ++pages;
    for (const auto& c : page.clips) EXPECT_TRUE(seen.insert(c.clip_id).second) << c.clip_id;
    if (!page.continuation) break;
    req.continuation = page.continuation;
    req.config.sample_seed.reset();  // the token carries the seed
    page = run_query(dual_library(), req);
  }
  EXPECT_EQ(seen.size(), page.total_matches);
  EXPECT_EQ(pages, (page.total_matches + 3) / 4);
}

TEST(RunQuery, TokenForAnotherQueryRejected) {
  auto first = run_query(dual_library(), structured({lits({"behind"}), {}, std::nullopt}));
  ASSERT_TRUE(first.continuation);
  auto other = structured({lits({"above"}), {}, std::nullopt});
  other.continuation = first.continuation;
  EXPECT_THROW(run_query(dual_library(), other), ValidationError);
  other.continuation = "garbage";
  EXPECT_THROW(run_query(dual_library(), other), ValidationError);
}

TEST(RunQuery, EntropySeedIsReported) {
  auto res = run_query(dual_library(), structured({lits({"behind"}), {}, std::nullopt}, std::nullopt));
  auto again = run_query(dual_library(), structured({lits({"behind"}), {}, std::nullopt}, res.sample_seed));
  ASSERT_EQ(res.clips.size(), again.clips.size());
  for (std::size_t i = 0; i < res.clips.size(); ++i) EXPECT_EQ(res.clips[i].clip_id, again.clips[i].clip_id);
}

TEST(RunQuery, RawLtlf) {
  QueryRequest r;
  r.query = std::string("lane-2 & X lane-1");
  r.config.sample_seed = 3;
  auto res = run_query(dual_library(), r);
  for (const auto& c : res.clips) {
    ASSERT_EQ(c.frames.size(), 2u);
    EXPECT_TRUE(c.frames[1].letter.contains("lane-1"));
  }
  r.query = std::string("lane-9 U behind");
  try {
    run_query(dual_library(), r);
    FAIL();
  } catch (const UnknownPredicate& e) {
    EXPECT_EQ(e.field(), "raw_ltlf");
  }
  r.query = std::string("lane-1 U");
  EXPECT_THROW(run_query(dual_library(), r), ParseError);
}

TEST(RunQuery, ClipsSatisfyTheirFormula) {
  auto res = run_query(dual_library(),
                       structured({lits({"lane-1"}), lits({"lane-4"}), std::nullopt}, 1));
  for (const auto& c : res.clips) {
    ltlf::AbstractTrace t;
    for (const auto& s : c.frames) t.push_back(s.letter);
    EXPECT_TRUE(ltlf::evaluate(ltlf::parse(res.formula), t));
  }
}

TEST(ResolveClip, KnownAndUnknown) {
  const auto& ep = dual_library().episodes()[2];
  auto c = engine::resolve_clip(dual_library(), engine::clip_id(ep.id, 3, 7));
  EXPECT_EQ(c.trace_id, ep.id);
  ASSERT_EQ(c.frames.size(), 5u);
  EXPECT_EQ(c.frames[0], ep.steps[2]);
  for (const char* bad : {"nonexistent", "ep-1:0:3", "ep-1:5:3", "ep-1:1:999", "nope:1:1", "ep-1:x:2", ":1:1"}) {
    EXPECT_THROW(engine::resolve_clip(dual_library(), bad), NotFound) << bad;
  }
}

TEST(RunQuery, InvalidBounds) {
  auto r = structured({lits({"behind"}), {}, std::nullopt});
  r.config.min_len = 10;
  r.config.max_len = 5;
  EXPECT_THROW(run_query(dual_library(), r), ValidationError);
  EXPECT_THROW(run_query(TraceLibrary{}, structured({})), ValidationError);
}

}  // namespace
