#include <gtest/gtest.h>

#include <fstream>

#include "culturescope/acquisition.hpp"
#include "culturescope/error.hpp"
#include "culturescope/mock_llm.hpp"
#include "support.hpp"

using namespace culturescope;

namespace {

const std::string kFixtures = (cstest::data_dir() / "fixtures").string();

FixtureFetcher fixture_fetcher() { return FixtureFetcher::from_file(kFixtures + "/pages.json"); }
MockSearchProvider fixture_search() { return MockSearchProvider::from_file(kFixtures + "/search_corpus.json"); }

RawDocument fetch_one(const std::string& url, const std::string& dimension_id) {
  auto fetcher = fixture_fetcher();
  FakeClock clock;
  QuerySpec spec{dimension_id, "Spanish", "en", "unused"};
  const auto got = fetch_documents(spec, nullptr, fetcher, {{url, dimension_id}}, SourceClassifier::defaults(), clock);
  if (got.documents.size() != 1) throw std::runtime_error("fixture page missing: " + url);
  return got.documents[0];
}

}  // namespace

TEST(Acquisition, PlanCoversEveryLeaf) {
  const auto specs = plan_retrieval(cstest::canonical_schema(), "Spanish", "en");
  EXPECT_EQ(specs.size(), 140u);
  for (const auto& s : specs) {
    EXPECT_EQ(s.culture, "Spanish");
    EXPECT_NE(s.query_text.find("Spanish"), std::string::npos);
  }
}

TEST(Acquisition, PlanIncludesSubDimensionsWhenConfigured) {
  const Schema expanded = expand_schema(cstest::canonical_schema(),
                                        {{"dimension.alcohol", "Legal Norms"}, {"dimension.eating_habits", "Meal Times"}});
  PlanOptions opts;
  EXPECT_EQ(plan_retrieval(expanded, "Spanish", "en", opts).size(), 140u);
  opts.include_sub_dimensions = true;
  EXPECT_EQ(plan_retrieval(expanded, "Spanish", "en", opts).size(), 142u);
}

TEST(Acquisition, PlanRejectsEmptyCulture) {
  try {
    plan_retrieval(cstest::canonical_schema(), "", "en");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(Acquisition, FixtureQueryYieldsTopFive) {
  auto search = fixture_search();
  auto fetcher = fixture_fetcher();
  FakeClock clock;
  const auto spec = build_query(cstest::canonical_schema().at("dimension.eating_habits"), "Spanish", "en");
  ASSERT_EQ(spec.query_text, "eating habits in Spanish culture");
  const auto got = fetch_documents(spec, &search, fetcher, {}, SourceClassifier::defaults(), clock);
  ASSERT_EQ(got.documents.size(), 5u);
  for (std::size_t i = 0; i < got.documents.size(); ++i) {
    EXPECT_EQ(got.documents[i].search_rank, static_cast<int>(i) + 1);
    EXPECT_EQ(got.documents[i].dimension_id, "dimension.eating_habits");
    EXPECT_FALSE(got.documents[i].body_text.empty());
    EXPECT_EQ(got.documents[i].body_text.find("Subscribe"), std::string::npos);
  }
}

TEST(Acquisition, EmptyPageIsExcluded) {
  FixtureFetcher fetcher({{"https://a.example/empty", "<html><body><nav>menu</nav><script>x()</script></body></html>"},
                          {"https://a.example/full", "<p>Real words about the custom.</p>"}});
  FakeClock clock;
  QuerySpec spec{"dimension.alcohol", "Spanish", "en", "q"};
  const auto got = fetch_documents(spec, nullptr, fetcher,
                                   {{"https://a.example/empty", std::nullopt}, {"https://a.example/full", std::nullopt}},
                                   SourceClassifier::defaults(), clock);
  ASSERT_EQ(got.documents.size(), 1u);
  EXPECT_EQ(got.documents[0].url, "https://a.example/full");
  EXPECT_FALSE(got.warnings.empty());
}

TEST(Acquisition, SeedUrlsWithoutSearch) {
  auto fetcher = fixture_fetcher();
  FakeClock clock;
  QuerySpec spec{"dimension.alcohol", "Spanish", "en", "q"};
  const auto seeds = parse_seed_urls(
      "# curated\nhttps://www.sanidad.gob.es/alcohol-menores dimension.alcohol\nhttps://en.wikipedia.org/wiki/Wine_in_Spain\n");
  ASSERT_EQ(seeds.size(), 2u);
  const auto got = fetch_documents(spec, nullptr, fetcher, seeds, SourceClassifier::defaults(), clock);
  ASSERT_EQ(got.documents.size(), 2u);
  for (const auto& d : got.documents) EXPECT_FALSE(d.search_rank.has_value());
}

TEST(Acquisition, SeedsForOtherDimensionsAreIgnored) {
  auto fetcher = fixture_fetcher();
  FakeClock clock;
  QuerySpec spec{"dimension.alcohol", "Spanish", "en", "q"};
  const auto got = fetch_documents(spec, nullptr, fetcher, {{"https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals"}},
                                   SourceClassifier::defaults(), clock);
  EXPECT_TRUE(got.documents.empty());
}

TEST(Acquisition, DocIdsAreStable) {
  const auto a = fetch_one("https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals");
  const auto b = fetch_one("https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals");
  EXPECT_EQ(a.doc_id, b.doc_id);
  EXPECT_EQ(a.doc_id.size(), 16u);
}

TEST(Acquisition, SourceClassification) {
  EXPECT_EQ(classify_source("https://en.wikipedia.org/wiki/Spain", ""), SourceCategory::kEncyclopedia);
  EXPECT_EQ(classify_source("https://www.sanidad.gob.es/x", ""), SourceCategory::kGovernment);
  EXPECT_EQ(classify_source("https://www.bbc.co.uk/news", ""), SourceCategory::kMedia);
  EXPECT_EQ(classify_source("https://www.spain.info/en/", ""), SourceCategory::kTourismCulture);
  EXPECT_EQ(classify_source("https://www.reddit.com/r/spain", ""), SourceCategory::kForum);
  EXPECT_EQ(classify_source("https://random-blog.example.net/post", "My trip"), SourceCategory::kOther);
  EXPECT_EQ(classify_source("https://random-blog.example.net/post", "Encyclopedia of Spain"),
            SourceCategory::kEncyclopedia);
}

TEST(Acquisition, CustomRulesFile) {
  cstest::TempDir tmp;
  const auto path = tmp.path() / "rules.json";
  std::ofstream(path) << R"({"rules":[{"kind":"host_suffix","pattern":"example.net","category":"EDUCATION"}]})";
  const auto c = SourceClassifier::from_file(path);
  EXPECT_EQ(c.classify("https://x.example.net/a", ""), SourceCategory::kEducation);
  EXPECT_EQ(c.classify("https://en.wikipedia.org/", ""), SourceCategory::kOther);
}

TEST(Acquisition, UrlParsing) {
  const auto u = parse_url("https://Sub.Example.COM:8443/a/b?c=1");
  EXPECT_EQ(u.scheme, "https");
  EXPECT_EQ(u.host, "sub.example.com");
  EXPECT_THROW(parse_url("ftp://example.com/"), Error);
  EXPECT_THROW(parse_url("https:///nohost"), Error);
}

TEST(Acquisition, CleanHtmlDropsChrome) {
  const auto page = clean_html(
      "<html><head><title>T &amp; U</title><style>p{}</style></head><body><nav>Home</nav>"
      "<h1>Heading</h1><p>First para&nbsp;here.</p><script>var a=1;</script><footer>(c)</footer>"
      "<ul><li>item &#241;</li></ul></body></html>");
  EXPECT_EQ(page.title, "T & U");
  EXPECT_NE(page.text.find("First para here."), std::string::npos);
  EXPECT_NE(page.text.find("item ñ"), std::string::npos);
  EXPECT_EQ(page.text.find("Home"), std::string::npos);
  EXPECT_EQ(page.text.find("var a"), std::string::npos);
  EXPECT_EQ(page.text.find("(c)"), std::string::npos);
}

TEST(Acquisition, FilterAcceptsFestivalPage) {
  MockChatProvider chat;
  const auto doc = fetch_one("https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals");
  const auto v = llm_filter(doc, "celebration of festivals", chat);
  EXPECT_EQ(v.decision, FilterDecision::kAccepted);
  EXPECT_EQ(v.reason, "ACCEPT");
}

TEST(Acquisition, FilterRejectsSportsScores) {
  MockChatProvider chat;
  const auto doc = fetch_one("https://www.sportsworld.example.com/liga-results", "dimension.celebration_of_festivals");
  const auto v = llm_filter(doc, "celebration of festivals", chat);
  EXPECT_EQ(v.decision, FilterDecision::kRejected);
  EXPECT_EQ(v.reason, "OFF_TOPIC");
}

TEST(Acquisition, FilterRejectsOtherCultureAndBoilerplate) {
  MockChatProvider chat;
  const auto japan = fetch_one("https://www.japan-guide.example.com/festivals", "dimension.celebration_of_festivals");
  EXPECT_EQ(llm_filter(japan, "celebration of festivals", chat).reason, "WRONG_CULTURE");
  const auto cookies = fetch_one("https://www.cookie-wall.example.com/fiestas", "dimension.religious_holidays");
  EXPECT_EQ(llm_filter(cookies, "religious holidays", chat).reason, "BOILERPLATE");
}

TEST(Acquisition, FilterEmptyBodyIsPrecondition) {
  MockChatProvider chat;
  RawDocument d;
  d.url = "https://a.example/";
  d.culture = "Spanish";
  try {
    llm_filter(d, "alcohol", chat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(Acquisition, FilterRetriesOnceThenUndecided) {
  int calls = 0;
  ScriptedChatProvider chat([&](const ChatRequest&) {
    ++calls;
    return std::string("maybe?");
  });
  RawDocument d = fetch_one("https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals");
  const auto v = llm_filter(d, "celebration of festivals", chat);
  EXPECT_EQ(v.decision, FilterDecision::kRejected);
  EXPECT_EQ(v.reason, "UNDECIDED");
  EXPECT_EQ(calls, 2);
}

TEST(Acquisition, RawDocumentJsonRoundTrip) {
  const auto d = fetch_one("https://en.wikipedia.org/wiki/Falles", "dimension.celebration_of_festivals");
  nlohmann::json j = d;
  EXPECT_TRUE(j["search_rank"].is_null());
  const auto back = j.get<RawDocument>();
  EXPECT_EQ(back.doc_id, d.doc_id);
  EXPECT_EQ(back.body_text, d.body_text);
  EXPECT_EQ(back.source_category, SourceCategory::kEncyclopedia);
}
