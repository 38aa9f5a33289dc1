#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "culturescope/error.hpp"
#include "culturescope/mock_llm.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/text.hpp"
#include "support.hpp"

using namespace culturescope;

namespace {

const char* kFireworks = "Fireworks and bonfires play a significant role in Las Fallas.";

std::vector<KnowledgeInstance> fallas_context() {
  return {cstest::make_instance("dimension.celebration_of_festivals", kFireworks),
          cstest::make_instance("dimension.celebration_of_festivals",
                                "Neighbourhood associations spend the whole year building large satirical figures."),
          cstest::make_instance("dimension.celebration_of_festivals",
                                "On the final night of the festival the figures are burned in the streets.")};
}

// Six dimensions over two topic aspects, eight statements each.
KnowledgeBase synthetic_kb() {
  const std::vector<std::string> dims = {"dimension.celebration_of_festivals", "dimension.religious_holidays",
                                         "dimension.national_holidays", "dimension.alcohol",
                                         "dimension.general_greeting_principles", "dimension.punctuality_when_visiting"};
  const std::vector<std::string> nouns = {"lanterns", "processions", "bonfires", "markets", "choirs", "parades",
                                          "banquets", "dances", "sweets", "candles", "bells", "costumes"};
  const std::vector<std::string> places = {"Valencia", "Seville", "Madrid", "Bilbao", "Granada", "Toledo", "Cadiz",
                                           "Murcia"};
  std::vector<KnowledgeInstance> kb;
  for (std::size_t d = 0; d < dims.size(); ++d)
    for (std::size_t i = 0; i < places.size(); ++i)
      kb.push_back(cstest::make_instance(dims[d], "Residents of " + places[i] + " associate " + nouns[(d + i) % 12] +
                                                      " with " + nouns[(d + 2 * i + 5) % 12] + " during " +
                                                      dims[d].substr(10) + " customs."));
  kb.push_back(cstest::make_instance("dimension.alcohol", "Rejected statement about wine.", "u", QcStatus::kRejected));
  return KnowledgeBase(kb);
}

}  // namespace

TEST(QuestionGen, SingleInstanceContext) {
  const KnowledgeBase kb({cstest::make_instance("dimension.alcohol", "The legal drinking age in Spain is 18.")});
  const auto s = sample_context(kb, cstest::canonical_schema(), std::string("dimension.alcohol"), 1, std::uint64_t{5});
  ASSERT_EQ(s.instances.size(), 1u);
  EXPECT_EQ(s.instances[0].statement, "The legal drinking age in Spain is 18.");
  EXPECT_EQ(s.shortfall, 0u);
}

TEST(QuestionGen, SamplingIsSeeded) {
  const KnowledgeBase kb = synthetic_kb();
  const auto& schema = cstest::canonical_schema();
  const auto a = sample_context(kb, schema, std::string("dimension.alcohol"), 3, std::uint64_t{99});
  const auto b = sample_context(kb, schema, std::string("dimension.alcohol"), 3, std::uint64_t{99});
  EXPECT_EQ(a.instances, b.instances);
}

TEST(QuestionGen, SamplingFrequenciesMatchBinomial) {
  std::vector<KnowledgeInstance> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(cstest::make_instance("dimension.alcohol", "fact " + std::to_string(i)));
  const KnowledgeBase kb(ten);
  std::map<std::string, int> hits;
  Rng rng(2024);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const auto s = sample_context(kb, cstest::canonical_schema(), std::string("dimension.alcohol"), 3, rng);
    ASSERT_EQ(s.instances.size(), 3u);
    std::set<std::string> uniq;
    for (const auto& k : s.instances) {
      uniq.insert(k.kb_id);
      ++hits[k.kb_id];
    }
    ASSERT_EQ(uniq.size(), 3u);
  }
  const double p = 0.3, mean = draws * p, sigma = std::sqrt(draws * p * (1 - p));
  ASSERT_EQ(hits.size(), 10u);
  for (const auto& [id, n] : hits) EXPECT_LE(std::abs(n - mean), 3 * sigma) << id;
}

TEST(QuestionGen, SamplingFallsBackToTopicAspect) {
  const KnowledgeBase kb({cstest::make_instance("dimension.alcohol", "a"),
                          cstest::make_instance("dimension.pork", "b"),
                          cstest::make_instance("dimension.eating_habits", "c")});
  const auto s = sample_context(kb, cstest::canonical_schema(), std::string("dimension.alcohol"), 3, std::uint64_t{1});
  EXPECT_TRUE(s.fallback);
  EXPECT_EQ(s.instances.size(), 2u);  // pork shares the aspect, eating habits does not
  EXPECT_EQ(s.shortfall, 1u);
  EXPECT_EQ(s.instances[0].dimension_id, "dimension.alcohol");
}

TEST(QuestionGen, SamplingEmptyScopeFails) {
  const KnowledgeBase kb({cstest::make_instance("dimension.alcohol", "a")});
  try {
    sample_context(kb, cstest::canonical_schema(), std::string("dimension.national_holidays"), 2, std::uint64_t{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSampling);
  }
}

TEST(QuestionGen, FallasFactualMultipleChoice) {
  MockChatProvider chat;
  const auto item = generate_question(fallas_context(), ContentType::kFactual, FormatType::kMultipleChoice, "en", chat,
                                      cstest::canonical_schema());
  ASSERT_EQ(item.options.size(), 4u);
  const auto it = std::find_if(item.options.begin(), item.options.end(),
                               [&](const QuestionOption& o) { return o.label == item.reference_answer; });
  ASSERT_NE(it, item.options.end());
  EXPECT_NE(it->text.find("Fireworks and bonfires"), std::string::npos);
  EXPECT_EQ(item.dimension_id, "dimension.celebration_of_festivals");
  EXPECT_EQ(item.knowledge_ids.size(), 3u);
  EXPECT_EQ(item.knowledge_ids[0], fallas_context()[0].kb_id);
  EXPECT_NO_THROW(check_item(item));
}

TEST(QuestionGen, MisleadingItemKeysTheStereotype) {
  MockChatProvider chat;
  const std::vector<KnowledgeInstance> ctx = {
      cstest::make_instance("dimension.male_dominance", "Many Spanish households share cooking between partners."),
      cstest::make_instance("dimension.male_dominance", "Women in Spain have high workforce participation."),
      cstest::make_instance("dimension.male_dominance", "Spanish fathers take paid paternity leave.")};
  const auto item = generate_question(ctx, ContentType::kMisleading, FormatType::kMultipleChoice, "en", chat,
                                      cstest::canonical_schema());
  EXPECT_NE(item.question_text.find("stereotype"), std::string::npos);
  const auto it = std::find_if(item.options.begin(), item.options.end(),
                               [&](const QuestionOption& o) { return o.label == item.reference_answer; });
  ASSERT_NE(it, item.options.end());
  for (const auto& k : ctx) EXPECT_NE(it->text, k.statement.substr(0, k.statement.size() - 1));
  const std::string lower = text::to_lower(it->text);
  EXPECT_TRUE(lower.find("everyone") != std::string::npos || lower.find("all people") != std::string::npos ||
              lower.find("never") != std::string::npos);
}

TEST(QuestionGen, EmptyContextIsPrecondition) {
  MockChatProvider chat;
  try {
    generate_question({}, ContentType::kFactual, FormatType::kTrueFalse, "en", chat, cstest::canonical_schema());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(QuestionGen, GenerationRetriesWithReminderThenFails) {
  int calls = 0;
  ScriptedChatProvider chat([&](const ChatRequest&) {
    ++calls;
    return std::string("I cannot write a question.");
  });
  try {
    generate_question(fallas_context(), ContentType::kFactual, FormatType::kMultipleChoice, "en", chat,
                      cstest::canonical_schema());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneration);
  }
  EXPECT_EQ(calls, 2);
}

TEST(QuestionGen, ParseFourOptions) {
  const auto p = parse_generated(
      "Question: What plays a significant role in Las Fallas?\nA) Tomatoes\nB) Fireworks and bonfires\n"
      "C) Horse races\nD) Snow sculptures\nReference Answer: B",
      FormatType::kMultipleChoice);
  EXPECT_EQ(p.options.size(), 4u);
  EXPECT_EQ(p.reference_answer, "B");
  EXPECT_EQ(p.question_text, "What plays a significant role in Las Fallas?");
}

TEST(QuestionGen, ParseTrueFalseAnswer) {
  const auto p = parse_generated("Question: Good Friday is a public holiday in Spain.\nReference Answer: True.",
                                 FormatType::kTrueFalse);
  EXPECT_EQ(p.reference_answer, "true");
  EXPECT_EQ(parse_truth_token("Falso"), false);
  EXPECT_EQ(parse_truth_token("正确"), true);
}

TEST(QuestionGen, ParseWithoutReferenceFails) {
  try {
    parse_generated("Question: Something?\nA) x\nB) y", FormatType::kMultipleChoice);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(QuestionGen, ParseAnswerGivenAsOptionText) {
  const auto p = parse_generated("Question: Q?\n(A) Tomatoes\n(B) Fireworks\nAnswer: Fireworks", FormatType::kMultipleChoice);
  EXPECT_EQ(p.reference_answer, "B");
}

TEST(QuestionGen, QcVerifiesConsistentItem) {
  MockChatProvider chat;
  const KnowledgeBase kb(fallas_context());
  auto item = generate_question(fallas_context(), ContentType::kFactual, FormatType::kMultipleChoice, "en", chat,
                                cstest::canonical_schema());
  const auto v = qc_question(item, kb, chat);
  EXPECT_EQ(v.status, QcStatus::kVerified);
  EXPECT_EQ(v.reason, "CONSISTENT");
}

TEST(QuestionGen, QcRejectsWrongAnswer) {
  MockChatProvider chat;
  const KnowledgeBase kb(fallas_context());
  auto item = generate_question(fallas_context(), ContentType::kFactual, FormatType::kMultipleChoice, "en", chat,
                                cstest::canonical_schema());
  item.reference_answer = item.reference_answer == "A" ? "B" : "A";
  const auto v = qc_question(item, kb, chat);
  EXPECT_EQ(v.status, QcStatus::kRejected);
  EXPECT_EQ(v.reason, "WRONG_ANSWER");
}

TEST(QuestionGen, QcUnknownKnowledgeIsPrecondition) {
  MockChatProvider chat;
  auto item = cstest::make_item("q1", "dimension.alcohol", ContentType::kFactual, FormatType::kTrueFalse, {"deleted-id"});
  try {
    qc_question(item, KnowledgeBase(fallas_context()), chat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(QuestionGen, PlanArithmetic) {
  GenerationPlan p;
  p.culture = "Spanish";
  p.language = "en";
  p.total_items = 40;
  for (auto t : kAllContentTypes) EXPECT_EQ(p.count(t), 10);
  EXPECT_EQ(p.k_for(ContentType::kMultiHop), 5);
  EXPECT_EQ(p.budget_for(ContentType::kFactual), 10 + 20);
  p.total_items = 41;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW(plan_from_json({{"total_items", 4}, {"bogus", 1}}), Error);
}

TEST(QuestionGen, BuildFortyItemDataset) {
  MockChatProvider chat;
  GenerationPlan plan;
  plan.culture = "Spanish";
  plan.language = "en";
  plan.total_items = 40;
  plan.seed = 11;
  const KnowledgeBase kb = synthetic_kb();
  const Dataset ds = build_dataset(kb, cstest::canonical_schema(), plan, chat);
  std::map<ContentType, int> per_type;
  std::set<std::string> ids;
  for (const auto& it : ds.items) {
    ++per_type[it.content_type];
    ids.insert(it.item_id);
    EXPECT_EQ(it.qc_status, QcStatus::kVerified);
    for (const auto& k : it.knowledge_ids) EXPECT_NE(kb.find(k), nullptr);
  }
  for (auto t : kAllContentTypes) EXPECT_EQ(per_type[t], 10) << to_string(t);
  EXPECT_EQ(ids.size(), 40u);
  EXPECT_EQ(ds.manifest.item_count, 40);
  EXPECT_EQ(ds.manifest.dataset_digest, dataset_digest(ds.items));
  EXPECT_TRUE(std::is_sorted(ds.items.begin(), ds.items.end(),
                             [](const QuestionItem& a, const QuestionItem& b) { return a.item_id < b.item_id; }));

  const Dataset again = build_dataset(kb, cstest::canonical_schema(), plan, chat);
  EXPECT_EQ(again.items, ds.items);
}

TEST(QuestionGen, ZeroPlanGivesEmptyDataset) {
  MockChatProvider chat;
  GenerationPlan plan;
  plan.culture = "Spanish";
  plan.language = "en";
  const Dataset ds = build_dataset(KnowledgeBase{}, cstest::canonical_schema(), plan, chat);
  EXPECT_TRUE(ds.items.empty());
  EXPECT_EQ(ds.manifest.item_count, 0);
  EXPECT_EQ(ds.manifest.dataset_digest, dataset_digest({}));
}

TEST(QuestionGen, ImpossiblePlanIsPartial) {
  MockChatProvider chat;
  GenerationPlan plan;
  plan.culture = "Spanish";
  plan.language = "en";
  plan.total_items = 400;
  plan.retry_budget = 5;
  try {
    build_dataset(KnowledgeBase(fallas_context()), cstest::canonical_schema(), plan, chat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPartialDataset);
  }
}

TEST(QuestionGen, SaveLoadAndTamperDetection) {
  MockChatProvider chat;
  GenerationPlan plan;
  plan.culture = "Spanish";
  plan.language = "en";
  plan.total_items = 8;
  plan.seed = 3;
  const Dataset ds = build_dataset(synthetic_kb(), cstest::canonical_schema(), plan, chat);
  cstest::TempDir tmp;
  save_dataset(ds, tmp.path());
  const Dataset back = load_dataset(tmp.path());
  EXPECT_EQ(back.items, ds.items);
  EXPECT_EQ(back.manifest.dataset_digest, ds.manifest.dataset_digest);

  std::string items = read_text_file(tmp.path() / "items.jsonl");
  const std::string key = "\"question_text\":\"";
  const auto at = items.find(key);
  ASSERT_NE(at, std::string::npos);
  items.insert(at + key.size(), "Tampered ");
  write_text_file(tmp.path() / "items.jsonl", items);
  try {
    load_dataset(tmp.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
}

TEST(QuestionGen, ItemIntegrityChecks) {
  auto mc = cstest::make_item("q", "dimension.alcohol", ContentType::kFactual, FormatType::kMultipleChoice);
  EXPECT_NO_THROW(check_item(mc));
  mc.reference_answer = "Z";
  EXPECT_THROW(check_item(mc), Error);
  auto tf = cstest::make_item("q", "dimension.alcohol", ContentType::kFactual, FormatType::kTrueFalse);
  tf.options = {{"A", "x"}};
  EXPECT_THROW(check_item(tf), Error);
}
