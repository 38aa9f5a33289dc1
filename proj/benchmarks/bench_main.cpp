#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "culturescope/acquisition.hpp"
#include "culturescope/curation.hpp"
#include "culturescope/evaluation.hpp"
#include "culturescope/extraction.hpp"
#include "culturescope/schema.hpp"

using namespace culturescope;

namespace {

const Schema& schema() {
  static const Schema s = load_schema(std::string(CULTURESCOPE_DATA_DIR) + "/schema/culturescope_schema.json");
  return s;
}

std::vector<KnowledgeInstance> random_instances(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> words = {"festival", "bonfire", "parade", "lunch",  "tapas",  "siesta",
                                                 "church",   "market",  "family", "wine",   "music",  "dance",
                                                 "greeting", "kiss",    "cheek",  "dinner", "evening", "plaza"};
  std::mt19937_64 rng(seed);
  std::vector<KnowledgeInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    KnowledgeInstance k;
    k.kb_id = "k" + std::to_string(i);
    k.culture = "Spanish";
    k.language = "en";
    k.dimension_id = "dimension.alcohol";
    for (int w = 0; w < 8; ++w) k.statement += (w ? " " : "") + words[rng() % words.size()];
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace

static void BM_LoadSchema(benchmark::State& state) {
  const std::string path = std::string(CULTURESCOPE_DATA_DIR) + "/schema/culturescope_schema.json";
  for (auto _ : state) benchmark::DoNotOptimize(load_schema(path));
}
BENCHMARK(BM_LoadSchema);

static void BM_ParseObjective(benchmark::State& state) {
  const std::vector<QuestionOption> options = {
      {"A", "Tomato fights"}, {"B", "Fireworks and bonfires"}, {"C", "Horse races"}, {"D", "Snow sculptures"}};
  const std::vector<std::string> replies = {"B", "The answer is (C).", "Fireworks and bonfires",
                                            "After some thought I pick option D because it snows.", "A or B"};
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_objective(replies[i++ % replies.size()], FormatType::kMultipleChoice, options));
}
BENCHMARK(BM_ParseObjective);

static void BM_CleanHtml(benchmark::State& state) {
  std::string html = "<html><head><script>var x=1;</script></head><body><nav>Home | About</nav>";
  for (int i = 0; i < state.range(0); ++i)
    html += "<p>Las Fallas in Valencia ends with large figures burned in bonfires &amp; fireworks.</p>";
  html += "<footer>Copyright</footer></body></html>";
  for (auto _ : state) benchmark::DoNotOptimize(clean_html(html));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_CleanHtml)->Arg(10)->Arg(200);

static void BM_Dedup(benchmark::State& state) {
  const auto kb = random_instances(static_cast<std::size_t>(state.range(0)), 5);
  HashEmbedder embed;
  for (auto _ : state) benchmark::DoNotOptimize(dedup(kb, kDefaultDedupThreshold, embed));
}
BENCHMARK(BM_Dedup)->Arg(100)->Arg(500);

static void BM_KMeansSilhouette(benchmark::State& state) {
  HashEmbedder embed;
  std::vector<std::string> texts;
  for (const auto& k : random_instances(static_cast<std::size_t>(state.range(0)), 9)) texts.push_back(k.statement);
  const auto points = embed.embed(texts);
  for (auto _ : state) {
    Rng rng(1);
    const auto r = kmeans(points, 4, rng);
    benchmark::DoNotOptimize(silhouette_score(points, r.labels));
  }
}
BENCHMARK(BM_KMeansSilhouette)->Arg(50)->Arg(200);

static void BM_GroupAccuracy(benchmark::State& state) {
  const auto leaves = leaf_dimensions(schema());
  std::mt19937_64 rng(3);
  std::vector<QuestionItem> items;
  std::vector<EvalRecord> records;
  for (int i = 0; i < state.range(0); ++i) {
    QuestionItem q;
    q.item_id = "q" + std::to_string(i);
    q.language = "en";
    q.dimension_id = leaves[rng() % leaves.size()].node_id;
    items.push_back(q);
    EvalRecord r;
    r.item_id = q.item_id;
    r.correct = rng() % 2 == 0;
    records.push_back(r);
  }
  for (auto _ : state) benchmark::DoNotOptimize(group_accuracy(records, items, schema(), GroupKey::kCategory));
}
BENCHMARK(BM_GroupAccuracy)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
