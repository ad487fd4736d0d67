#include <gtest/gtest.h>

#include "tracequery/abstraction/highway.hpp"
#include "tracequery/query/wire.hpp"
#include "tracequery/ui/form.hpp"

namespace {

using namespace tracequery;
using namespace tracequery::ui;
using query::ConstraintKind;

const std::set<std::string> kVocab = abstraction::default_vocab(4).names();

TEST(BuildRequest, StaysConstantExample) {
  QueryFormState form{{"lane-1", {"behind"}}, {"lane-4", {}}, ConstraintKind::StaysConstant, "behind", std::nullopt};
  EXPECT_EQ(build_request(form), json::parse(R"({"start": ["lane-1", "behind"], "end": ["lane-4"],
                                                 "constraint": {"kind": "stays_constant", "c": ["behind"]}})"));
}

TEST(BuildRequest, AllAny) {
  EXPECT_EQ(build_request(QueryFormState{}), json::parse(R"({"start": [], "end": [], "constraint": null})"));
}

TEST(BuildRequest, ChangesIntoCarriesBothFields) {
  QueryFormState form{{}, {}, ConstraintKind::ChangesInto, "lane-1", "lane-2"};
  EXPECT_EQ(build_request(form)["constraint"],
            json::parse(R"({"kind": "changes_into", "c": ["lane-1"], "c_prime": ["lane-2"]})"));
}

TEST(BuildRequest, IncompleteConstraintIsDropped) {
  EXPECT_TRUE(build_request(QueryFormState{{}, {}, ConstraintKind::ChangesInto, "lane-1", std::nullopt})["constraint"].is_null());
  EXPECT_TRUE(build_request(QueryFormState{{}, {}, ConstraintKind::ChangesInto, "lane-1", "lane-1"})["constraint"].is_null());
  EXPECT_TRUE(build_request(QueryFormState{{}, {}, ConstraintKind::Changes, std::nullopt, std::nullopt})["constraint"].is_null());
}

// Every form the drop-downs allow validates on the server.
TEST(BuildRequest, EveryFormIsAccepted) {
  std::vector<std::optional<std::string>> lanes = {std::nullopt, "lane-1", "lane-2", "lane-3", "lane-4"};
  std::vector<std::vector<std::string>> rels = {{}, {"behind"}, {"in-front"}, {"above"}, {"below"}};
  std::vector<std::optional<ConstraintKind>> kinds = {std::nullopt, ConstraintKind::Changes,
                                                      ConstraintKind::StaysConstant, ConstraintKind::ChangesInto};
  std::vector<std::optional<std::string>> preds = {std::nullopt, "lane-2", "behind", "above"};
  std::size_t forms = 0;
  for (const auto& sl : lanes) {
    for (const auto& sr : rels) {
      for (const auto& k : kinds) {
        for (const auto& c : preds) {
          for (const auto& cp : preds) {
            QueryFormState f{{sl, sr}, {lanes[4 - forms % 5], rels[forms % 5]}, k, c, cp};
            ASSERT_NO_THROW(query::validate(build_request(f), kVocab)) << build_request(f).dump();
            ++forms;
          }
        }
      }
    }
  }
  EXPECT_EQ(forms, 5u * 5 * 4 * 4 * 4);
}

TEST(ClipView, CursorStaysInsideTheClip) {
  ClipView v(12, 15);
  EXPECT_EQ(v.cursor(), 12u);
  v.seek(3);
  EXPECT_EQ(v.cursor(), 12u);
  v.seek(99);
  EXPECT_EQ(v.cursor(), 15u);
  EXPECT_TRUE(v.at_end());
  v.advance();
  EXPECT_EQ(v.cursor(), 15u);
  v.seek(13);
  EXPECT_EQ(v.frame_offset(), 1u);
}

}  // namespace
