#include <gtest/gtest.h>

#include <set>

#include "culturescope/error.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/schema.hpp"
#include "support.hpp"

using namespace culturescope;

namespace {

nlohmann::json tiny_doc() {
  return nlohmann::json::parse(R"({
    "version": "t1",
    "nodes": [
      {"id": "layer.a", "level": "LAYER", "name": "A", "parent": null, "origin": "CANONICAL"},
      {"id": "category.a", "level": "CATEGORY", "name": "Cat", "parent": "layer.a", "origin": "CANONICAL"},
      {"id": "aspect.a", "level": "TOPIC_ASPECT", "name": "Asp", "parent": "category.a", "origin": "CANONICAL"},
      {"id": "dimension.x", "level": "DIMENSION", "name": "x things", "parent": "aspect.a", "origin": "CANONICAL"}
    ]})");
}

std::size_t count_level(const Schema& s, Level level) {
  std::size_t n = 0;
  for (const auto& node : s.nodes()) n += node.level == level;
  return n;
}

}  // namespace

TEST(Schema, CanonicalFileHasExpectedLevelCounts) {
  const Schema& s = cstest::canonical_schema();
  EXPECT_EQ(count_level(s, Level::kLayer), 3u);
  EXPECT_EQ(count_level(s, Level::kCategory), 5u);
  EXPECT_EQ(count_level(s, Level::kTopicAspect), 18u);
  EXPECT_EQ(count_level(s, Level::kDimension), 140u);
  EXPECT_EQ(count_level(s, Level::kSubDimension), 0u);
  EXPECT_EQ(s.counts(), kCanonicalCounts);
}

TEST(Schema, CanonicalFileValidatesClean) {
  EXPECT_TRUE(validate(cstest::canonical_schema()).empty());
}

TEST(Schema, MissingParentIsRejected) {
  auto doc = tiny_doc();
  doc["nodes"][3]["parent"] = "aspect.nowhere";
  try {
    parse_schema(doc);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("dimension.x"), std::string::npos);
  }
}

TEST(Schema, RoundTripThroughFile) {
  cstest::TempDir tmp;
  const auto path = tmp.path() / "schema.json";
  save_schema(cstest::canonical_schema(), path);
  EXPECT_EQ(load_schema(path), cstest::canonical_schema());
}

TEST(Schema, DuplicateIdGivesOneUniquenessViolation) {
  auto nodes = parse_schema(tiny_doc()).nodes();
  nodes.push_back(nodes.back());
  const Schema s("dup", nodes);
  const auto v = validate(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].node_id, "dimension.x");
  EXPECT_NE(v[0].rule.find("unique"), std::string::npos);
}

TEST(Schema, CanonicalSubDimensionGivesOriginViolation) {
  auto nodes = parse_schema(tiny_doc()).nodes();
  DimensionNode sub;
  sub.node_id = "dimension.x.sub";
  sub.level = Level::kSubDimension;
  sub.name = "sub";
  sub.parent_id = "dimension.x";
  sub.origin = Origin::kCanonical;
  nodes.push_back(sub);
  const auto v = validate(Schema("o", nodes));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].rule.find("origin"), std::string::npos);
}

TEST(Schema, LeafDimensionsFilters) {
  const Schema& s = cstest::canonical_schema();
  EXPECT_EQ(leaf_dimensions(s).size(), 140u);

  const auto layer = leaf_dimensions(s, std::string("layer.institutional_norms"));
  ASSERT_FALSE(layer.empty());
  bool festivals = false;
  for (const auto& d : layer) {
    EXPECT_TRUE(s.is_within(d.node_id, "layer.institutional_norms"));
    festivals = festivals || d.name == "celebration of festivals";
  }
  EXPECT_TRUE(festivals);
  EXPECT_LT(layer.size(), 140u);

  const auto one = leaf_dimensions(s, std::string("dimension.alcohol"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].node_id, "dimension.alcohol");
}

TEST(Schema, LeafOrderIsStableAndUnique) {
  const auto a = leaf_dimensions(cstest::canonical_schema());
  std::set<std::string> ids;
  for (const auto& d : a) ids.insert(d.node_id);
  EXPECT_EQ(ids.size(), a.size());
  EXPECT_EQ(a, leaf_dimensions(cstest::canonical_schema()));
}

TEST(Schema, BuildQueryTemplates) {
  const Schema& s = cstest::canonical_schema();
  EXPECT_EQ(build_query(s.at("dimension.eating_habits"), "Spanish", "en").query_text,
            "eating habits in Spanish culture");
  EXPECT_EQ(build_query(s.at("dimension.celebration_of_festivals"), "Spanish", "en", "{Dimension} in {culture} culture")
                .query_text,
            "Celebration of Festivals in Spanish culture");
  EXPECT_THROW(build_query(s.at("dimension.alcohol"), "", "en"), Error);
  try {
    build_query(s.at("dimension.alcohol"), "  ", "en");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(Schema, BuildQueryRejectsInnerNodes) {
  const Schema& s = cstest::canonical_schema();
  try {
    build_query(s.at("category.geography_customs"), "Spanish", "en");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLevel);
  }
}

TEST(Schema, ExpandEmptyIsIdentity) {
  const Schema& s = cstest::canonical_schema();
  EXPECT_EQ(expand_schema(s, {}).nodes(), s.nodes());
}

TEST(Schema, ExpandAddsOneSubDimension) {
  const Schema& s = cstest::canonical_schema();
  const Schema e = expand_schema(s, {{"dimension.alcohol", "Cultural Integration"}});
  EXPECT_EQ(e.nodes().size(), s.nodes().size() + 1);
  const auto subs = sub_dimensions(e);
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(subs[0].parent_id, "dimension.alcohol");
  EXPECT_EQ(subs[0].origin, Origin::kExpanded);
  EXPECT_EQ(subs[0].name, "Cultural Integration");
  EXPECT_TRUE(validate(e).empty());
  EXPECT_EQ(s.counts().sub_dimensions, 0u);
}

TEST(Schema, ExpandIsIdempotent) {
  const Schema& s = cstest::canonical_schema();
  const std::vector<KeywordLabel> kw = {{"dimension.alcohol", "Cultural Integration"},
                                        {"dimension.alcohol", "Cultural Integration"}};
  const Schema once = expand_schema(s, kw);
  const Schema twice = expand_schema(once, kw);
  EXPECT_EQ(once.nodes().size(), s.nodes().size() + 1);
  EXPECT_EQ(twice.nodes().size(), once.nodes().size());
}

TEST(Schema, ExpandUnknownParentFails) {
  EXPECT_THROW(expand_schema(cstest::canonical_schema(), {{"dimension.nope", "X"}}), Error);
}

TEST(Schema, ReportCategoriesFollowColumnOrder) {
  const auto cats = cstest::canonical_schema().report_categories();
  std::vector<std::string> abbrevs;
  for (const auto* c : cats) abbrevs.push_back(c->abbrev);
  EXPECT_EQ(abbrevs, (std::vector<std::string>{"G&C", "PC&H", "R&P", "SR&S", "V&B"}));
}

TEST(Schema, UnknownLevelIsParseError) {
  auto doc = tiny_doc();
  doc["nodes"][1]["level"] = "GALAXY";
  try {
    parse_schema(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}
