// Runs the acceptance criteria and prints one status line per criterion.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "culturescope/curation.hpp"
#include "culturescope/error.hpp"
#include "culturescope/evaluation.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/mock_llm.hpp"
#include "culturescope/reporting.hpp"
#include "culturescope/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace culturescope;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  std::string status;  // PASS, FAIL or SKIP
  std::string detail;
};

Outcome pass(std::string d) { return {"PASS", std::move(d)}; }
Outcome fail(std::string d) { return {"FAIL", std::move(d)}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cli(const std::vector<std::string>& args, std::string* err_out = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

json fixture_config_json(const fs::path& workspace) {
  json j = read_json_file(cstest::fixture_config());
  const auto dir = cstest::fixture_config().parent_path();
  j["schema_path"] = (dir / j["schema_path"].get<std::string>()).lexically_normal().string();
  for (const char* p : {"search", "fetch"})
    j["providers"][p]["fixture_path"] = (dir / j["providers"][p]["fixture_path"].get<std::string>()).string();
  j["acquisition"]["seed_urls"] = (dir / j["acquisition"]["seed_urls"].get<std::string>()).string();
  j["generation"]["plan_path"] = (dir / j["generation"]["plan_path"].get<std::string>()).string();
  j["workspace_dir"] = workspace.string();
  return j;
}

// ---------------------------------------------------------------------------

Outcome schema_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Schema s = load_schema(cstest::schema_path());
  const auto c = s.counts();
  const double secs = seconds_since(t0);
  std::map<std::string, int> manual;
  for (const auto& n : s.nodes()) ++manual[std::string(to_string(n.level))];
  char d[160];
  std::snprintf(d, sizeof d, "layers=%zu categories=%zu aspects=%zu dimensions=%zu in %.3fs", c.layers, c.categories,
                c.topic_aspects, c.dimensions, secs);
  const bool ok = c.layers == 3 && c.categories == 5 && c.topic_aspects == 18 && c.dimensions == 140 &&
                  manual["LAYER"] == 3 && manual["CATEGORY"] == 5 && manual["TOPIC_ASPECT"] == 18 &&
                  manual["DIMENSION"] == 140 && validate(s).empty() && secs < 1.0;
  return ok ? pass(d) : fail(d);
}

Outcome metric_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  const Schema& schema = cstest::canonical_schema();
  const auto leaves = leaf_dimensions(schema);
  std::mt19937_64 rng(7);
  std::vector<QuestionItem> items;
  std::vector<EvalRecord> records;
  const std::vector<std::string> languages = {"en", "es", "zh"};
  for (int i = 0; i < 200; ++i) {
    const auto& dim = leaves[rng() % leaves.size()];
    auto q = cstest::make_item("rand" + std::to_string(i), dim.node_id, kAllContentTypes[rng() % 4],
                               static_cast<FormatType>(rng() % 4));
    q.language = languages[rng() % languages.size()];
    items.push_back(q);
    EvalRecord r;
    r.item_id = q.item_id;
    r.correct = rng() % 5 < 3;
    records.push_back(r);
  }
  std::int64_t brute = 0;
  for (const auto& r : records) brute += r.correct ? 1 : 0;
  const double expected = static_cast<double>(brute) / 200.0;
  const double got = accuracy(records);
  if (got != expected) return fail("accuracy " + fmt("%.17g", got) + " != brute force " + fmt("%.17g", expected));

  double worst = 0.0;
  for (GroupKey key : kAllGroupKeys) {
    const auto rows = group_accuracy(records, items, schema, key);
    const auto oracle = cstest::oracle::group_counts(records, items, schema, key);
    if (rows.size() != oracle.size()) return fail(std::string(to_string(key)) + ": group count differs from oracle");
    for (const auto& row : rows) {
      auto it = oracle.find(row.group);
      if (it == oracle.end() || it->second.n != row.n || it->second.correct != row.correct)
        return fail(std::string(to_string(key)) + ": tally differs for " + row.group);
    }
    worst = std::max(worst, std::abs(cstest::oracle::recompose(rows) - got));
  }
  const double secs = seconds_since(t0);
  const std::string d = "accuracy=" + fmt("%.4f", got) + " max recomposition error=" + fmt("%.2e", worst) +
                        " in " + fmt("%.3f", secs) + "s";
  return worst <= 1e-12 && secs < 5.0 ? pass(d) : fail(d);
}

Outcome hermetic_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  cstest::TempDir tmp("cs-accept");
  const fs::path config = tmp.path() / "config.json";
  write_json_file(config, fixture_config_json(tmp.path() / "unused"));

  auto one = [&](const fs::path& ws, std::string& why) -> bool {
    const fs::path root = ws / "spanish" / "en";
    const std::vector<std::vector<std::string>> steps = {
        {"build-kb"},
        {"curate"},
        {"gen-dataset"},
        {"evaluate", "--model", "mock-chat", "--dataset", (root / "datasets" / "plan_40").string(), "--kb",
         (root / "clusters" / "kb.jsonl").string()},
        {"report"}};
    for (const auto& step : steps) {
      std::vector<std::string> args = {"-q", "-c", config.string(), "-w", ws.string()};
      args.insert(args.end(), step.begin(), step.end());
      std::string err;
      const int code = cli(args, &err);
      if (code != 0) {
        why = step[0] + " exited " + std::to_string(code) + ": " + err.substr(0, 300);
        return false;
      }
    }
    return true;
  };
  std::string why;
  const fs::path a = tmp.path() / "a", b = tmp.path() / "b";
  if (!one(a, why) || !one(b, why)) return fail(why);

  const fs::path ra = a / "spanish" / "en", rb = b / "spanish" / "en";
  const auto items = read_records<QuestionItem>(ra / "datasets" / "plan_40" / "items.jsonl");
  std::map<ContentType, int> per_type;
  for (const auto& q : items) ++per_type[q.content_type];
  for (ContentType t : kAllContentTypes)
    if (per_type[t] != 10)
      return fail(std::string(to_string(t)) + " has " + std::to_string(per_type[t]) + " items, want 10");

  if (read_text_file(ra / "datasets" / "plan_40" / "items.jsonl") !=
      read_text_file(rb / "datasets" / "plan_40" / "items.jsonl"))
    return fail("datasets differ between runs");
  int logs = 0;
  for (const auto& e : fs::recursive_directory_iterator(ra / "runs")) {
    if (e.path().filename() != "records.jsonl") continue;
    const fs::path other = rb / fs::relative(e.path(), ra);
    if (!fs::exists(other) || read_text_file(e.path()) != read_text_file(other))
      return fail("run log differs: " + fs::relative(e.path(), ra).string());
    ++logs;
  }
  if (logs == 0) return fail("no run logs written");
  if (!fs::exists(ra / "reports" / "main_table.csv")) return fail("report did not write main_table.csv");
  const double secs = seconds_since(t0);
  const std::string d = std::to_string(items.size()) + " items, 10 per type, " + std::to_string(logs) +
                        " identical run logs, two runs in " + fmt("%.2f", secs) + "s";
  return secs < 60.0 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------------------

struct Fact {
  std::string statement;
  std::string claim;     // restatement
  std::string negation;  // the claim negated
  std::string wrong;     // plausible but unsupported alternative
};

const std::vector<Fact>& facts() {
  static const std::vector<Fact> f = {
      {"In Spain lunch is usually eaten between two and three in the afternoon.",
       "Lunch is usually eaten between two and three in the afternoon.",
       "Lunch is not usually eaten between two and three in the afternoon.", "Lunch is eaten at eleven in the morning."},
      {"The legal drinking age in Spain is eighteen years.", "The legal drinking age is eighteen years.",
       "The legal drinking age is not eighteen years.", "Drinking is permitted from age twenty five."},
      {"Las Fallas in Valencia ends with large figures burned in bonfires.",
       "Las Fallas ends with large figures burned in bonfires.",
       "Las Fallas never ends with large figures burned in bonfires.", "Las Fallas ends with a quiet horse parade."},
      {"Many Spanish families gather for a long dinner on Christmas Eve.",
       "Spanish families gather for a long dinner on Christmas Eve.",
       "Spanish families do not gather for a long dinner on Christmas Eve.", "Families travel abroad alone at Easter."},
      {"Spanish friends often greet each other with two kisses on the cheeks.",
       "Friends greet each other with two kisses on the cheeks.",
       "Friends never greet each other with two kisses on the cheeks.", "Friends bow deeply without touching."},
      {"Tipping in Spanish restaurants is modest and optional.",
       "Tipping in restaurants is modest and optional.", "Tipping in restaurants is not modest and optional.",
       "Diners must leave twenty percent service."},
      {"Most small shops in Spain close for a few hours in the afternoon.",
       "Small shops close for a few hours in the afternoon.",
       "Small shops do not close for a few hours in the afternoon.", "Shops stay open through every night."},
      {"The Three Kings bring gifts to Spanish children on the sixth of January.",
       "The Three Kings bring gifts to children on the sixth of January.",
       "The Three Kings never bring gifts to children on the sixth of January.", "Gifts arrive on midsummer morning."},
      {"Tapas are small dishes commonly shared with drinks in Spanish bars.",
       "Tapas are small dishes commonly shared with drinks in bars.",
       "Tapas are not small dishes commonly shared with drinks in bars.", "Tapas are large desserts eaten alone."},
      {"Spanish dinner is typically served after nine in the evening.",
       "Dinner is typically served after nine in the evening.", "Dinner is not typically served after nine in the evening.",
       "Dinner is served before five at teatime."},
  };
  return f;
}

QuestionItem base_item(const std::string& id, const KnowledgeInstance& k, FormatType format) {
  QuestionItem q = cstest::make_item(id, k.dimension_id, ContentType::kFactual, format, {k.kb_id});
  q.options.clear();
  return q;
}

Outcome qc_discrimination() {
  std::vector<KnowledgeInstance> kb;
  for (std::size_t i = 0; i < facts().size(); ++i) {
    auto k = cstest::make_instance("dimension.alcohol", facts()[i].statement);
    k.kb_id = "fact" + std::to_string(i);
    kb.push_back(k);
  }
  const KnowledgeBase base(kb);
  std::vector<QuestionItem> consistent, contradictory;
  const std::vector<std::string> labels = {"A", "B", "C", "D"};
  for (std::size_t i = 0; i < facts().size(); ++i) {
    const Fact& f = facts()[i];
    const Fact& g = facts()[(i + 3) % facts().size()];
    const Fact& h = facts()[(i + 6) % facts().size()];
    const std::string id = std::to_string(i);
    // Two triples of each polarity per fact, alternating through the formats.
    if (i < 5) {
      auto mc = base_item("mc" + id, kb[i], FormatType::kMultipleChoice);
      mc.question_text = "Which statement about life in Spain is accurate?";
      const std::size_t pos = i % 4;
      std::vector<std::string> texts = {f.wrong, g.wrong, h.wrong};
      texts.insert(texts.begin() + static_cast<long>(pos), f.claim);
      for (std::size_t j = 0; j < 4; ++j) mc.options.push_back({labels[j], texts[j]});
      mc.reference_answer = labels[pos];
      consistent.push_back(mc);
      mc.item_id = "mc-bad" + id;
      mc.reference_answer = labels[(pos + 1) % 4];
      contradictory.push_back(mc);

      auto tf = base_item("tf" + id, kb[i], FormatType::kTrueFalse);
      const bool use_negation = i % 2 == 1;
      tf.question_text = "True or false: " + (use_negation ? f.negation : f.claim);
      tf.reference_answer = use_negation ? "false" : "true";
      consistent.push_back(tf);
      tf.item_id = "tf-bad" + id;
      tf.reference_answer = use_negation ? "true" : "false";
      contradictory.push_back(tf);
    } else {
      auto sa = base_item("sa" + id, kb[i], FormatType::kShortAnswer);
      sa.question_text = "Describe the custom in one sentence.";
      sa.reference_answer = f.claim;
      consistent.push_back(sa);
      sa.item_id = "sa-bad" + id;
      sa.reference_answer = f.negation;
      contradictory.push_back(sa);

      auto es = base_item("es" + id, kb[i], FormatType::kEssay);
      es.knowledge_ids = {kb[i].kb_id, kb[(i + 1) % kb.size()].kb_id};
      const Fact& next = facts()[(i + 1) % facts().size()];
      es.question_text = "Discuss how these customs shape daily life.";
      es.reference_answer = f.claim + " " + next.claim;
      consistent.push_back(es);
      es.item_id = "es-bad" + id;
      es.reference_answer = f.claim + " " + next.negation;
      contradictory.push_back(es);
    }
  }
  MockChatProvider judge("scripted-judge");
  int verified = 0, rejected = 0;
  std::string misses;
  for (const auto& q : consistent) {
    const auto qc = qc_question(q, base, judge);
    if (qc.status == QcStatus::kVerified) ++verified;
    else misses += " " + q.item_id + "(" + qc.reason + ")";
  }
  for (const auto& q : contradictory) {
    const auto qc = qc_question(q, base, judge);
    if (qc.status == QcStatus::kRejected) ++rejected;
    else misses += " " + q.item_id;
  }
  const std::string d = "verified " + std::to_string(verified) + "/" + std::to_string(consistent.size()) +
                        " consistent, rejected " + std::to_string(rejected) + "/" +
                        std::to_string(contradictory.size()) + " contradictory" + (misses.empty() ? "" : ";" + misses);
  return verified == 20 && rejected == 20 && consistent.size() == 20 && contradictory.size() == 20 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------------------

Outcome injection_sweep_check() {
  // Item i links 3 statements (every fourth item only 2); the gold fact is the
  // last linked one, so only a full injection exposes all of them.
  std::vector<QuestionItem> items;
  std::vector<KnowledgeInstance> kb;
  std::map<std::string, std::vector<std::string>> linked;
  std::map<std::string, std::string> gold_by_question;
  std::map<std::string, std::string> key_by_question;
  for (int i = 0; i < 16; ++i) {
    const bool tf = i % 3 == 0;
    auto q = cstest::make_item("sweep" + std::to_string(i), "dimension.alcohol", ContentType::kFactual,
                               tf ? FormatType::kTrueFalse : FormatType::kMultipleChoice, {});
    q.question_text = "Sweep question " + std::to_string(i) + "?";
    const int n = i % 4 == 3 ? 2 : 3;
    for (int j = 0; j < n; ++j) {
      auto k = cstest::make_instance("dimension.alcohol",
                                     "Sweep fact " + std::to_string(i) + " part " + std::to_string(j) + ".");
      q.knowledge_ids.push_back(k.kb_id);
      linked[q.item_id].push_back(k.statement);
      kb.push_back(k);
    }
    gold_by_question[q.question_text] = linked[q.item_id].back();
    key_by_question[q.question_text] = q.reference_answer;
    items.push_back(q);
  }
  ScriptedChatProvider model(
      [&](const ChatRequest& r) {
        for (const auto& [question, gold] : gold_by_question) {
          if (r.user_text.find(question) == std::string::npos) continue;
          const std::string& key = key_by_question.at(question);
          const bool knows = r.user_text.find(gold) != std::string::npos;
          if (key == "true" || key == "false") return std::string(knows == (key == "true") ? "True" : "False");
          return std::string(knows ? key : (key == "A" ? "C" : "A"));
        }
        return std::string("A");
      },
      "gold-sensitive");

  EvalRunConfig cfg;
  cfg.model_id = "gold-sensitive";
  cfg.dataset_ref = "synthetic";
  cfg.dataset_digest = dataset_digest(items);
  cfg.language = "en";
  cfg.judge_model_id = "none";
  cfg.seed = 3;
  cfg.workers = 4;
  std::map<int, std::vector<PromptLogEntry>> logs;
  const std::vector<int> ks = {0, 1, 2, 3};
  const auto runs = injection_sweep(items, KnowledgeBase(kb), ks, model, nullptr, cfg, {}, &logs);
  std::map<std::string, std::string> id_of_prompt;
  for (int k : ks) {
    const auto& log = logs[k];
    if (log.size() != items.size()) return fail("prompt log for k=" + std::to_string(k) + " incomplete");
    for (const auto& e : log) {
      const auto& stmts = linked.at(e.item_id);
      const int want = std::min<int>(k, static_cast<int>(stmts.size()));
      int present = 0;
      for (const auto& s : stmts) present += e.prompt.find(s) != std::string::npos ? 1 : 0;
      const bool has_block = e.prompt.find("Reference:") != std::string::npos;
      if (present != want || count_reference_statements(e.prompt) != want || has_block != (want > 0) ||
          e.reference_count != want)
        return fail("k=" + std::to_string(k) + " item " + e.item_id + ": " + std::to_string(present) +
                    " statements in prompt, want " + std::to_string(want));
    }
  }
  std::string curve;
  bool monotone = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    curve += (i ? " " : "") + fmt("%.3f", runs[i].accuracy);
    if (i > 0 && runs[i].accuracy < runs[i - 1].accuracy) monotone = false;
  }
  const std::string d = "reference counts audited on " + std::to_string(items.size() * ks.size()) +
                        " prompts; accuracy by k: " + curve;
  return monotone && runs.back().accuracy == 1.0 ? pass(d) : fail(d);
}

Outcome parsing_robustness() {
  const auto t0 = std::chrono::steady_clock::now();
  const json fx = read_json_file(cstest::test_data_dir() / "parsing" / "phrasings.json");
  std::vector<QuestionOption> options;
  for (const auto& o : fx.at("options")) options.push_back({o.at("label").get<std::string>(), o.at("text").get<std::string>()});
  auto format_of = [](const json& c) {
    return c.at("format").get<std::string>() == "TRUE_FALSE" ? FormatType::kTrueFalse : FormatType::kMultipleChoice;
  };
  int hits = 0, total = 0, none = 0, ambiguous = 0;
  std::string misses;
  for (const auto& c : fx.at("resolved")) {
    ++total;
    const FormatType f = format_of(c);
    const auto got = parse_objective(c.at("text").get<std::string>(), f, f == FormatType::kTrueFalse ? std::vector<QuestionOption>{} : options);
    if (got && *got == c.at("label").get<std::string>()) ++hits;
    else misses += " [" + c.at("text").get<std::string>() + "]";
  }
  for (const auto& c : fx.at("ambiguous")) {
    ++ambiguous;
    const FormatType f = format_of(c);
    const auto got = parse_objective(c.at("text").get<std::string>(), f, f == FormatType::kTrueFalse ? std::vector<QuestionOption>{} : options);
    if (!got) ++none;
    else misses += " ambiguous[" + c.at("text").get<std::string>() + "]->" + *got;
  }
  const double secs = seconds_since(t0);
  const double rate = total ? static_cast<double>(hits) / total : 0.0;
  const std::string d = std::to_string(hits) + "/" + std::to_string(total) + " resolved, " + std::to_string(none) + "/" +
                        std::to_string(ambiguous) + " ambiguous returned none, " + fmt("%.3f", secs) + "s" +
                        (misses.empty() ? "" : ";" + misses);
  return total == 60 && ambiguous == 10 && rate >= 0.95 && none == ambiguous && secs < 1.0 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------------------

Outcome curation_properties() {
  HashEmbedder embed;
  MockChatProvider chat;
  // 200 instances drawn from a small vocabulary so exact and near duplicates occur.
  const std::vector<std::string> words = {"festival", "bonfire", "parade", "lunch", "tapas", "siesta",
                                          "church",   "market",  "family", "wine",  "music", "dance"};
  const std::vector<std::string> dims = {"dimension.alcohol", "dimension.celebration_of_festivals",
                                         "dimension.power_distance"};
  std::mt19937_64 rng(11);
  std::vector<KnowledgeInstance> pool;
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const int n = 3 + static_cast<int>(rng() % 3);
    for (int w = 0; w < n; ++w) s += (w ? " " : "") + words[rng() % words.size()];
    auto k = cstest::make_instance(dims[rng() % dims.size()], s + ".");
    k.kb_id = "r" + std::to_string(i);
    pool.push_back(k);
  }
  const auto once = dedup(pool, 0.9, embed);
  const auto twice = dedup(once, 0.9, embed);
  if (once != twice) return fail("dedup is not idempotent");
  if (once.size() >= pool.size()) return fail("randomized fixture produced no duplicates to merge");
  // Survivors are pairwise below the threshold inside each dimension.
  for (std::size_t i = 0; i < once.size(); ++i)
    for (std::size_t j = i + 1; j < once.size(); ++j) {
      if (once[i].dimension_id != once[j].dimension_id) continue;
      const auto a = embed.embed_one(once[i].statement), b = embed.embed_one(once[j].statement);
      double dot = 0, na = 0, nb = 0;
      for (std::size_t x = 0; x < a.size(); ++x) dot += a[x] * b[x], na += a[x] * a[x], nb += b[x] * b[x];
      if (once[i].statement == once[j].statement || dot / std::sqrt(na * nb) >= 0.9)
        return fail("survivors " + once[i].kb_id + " and " + once[j].kb_id + " are still near duplicates");
    }

  // Partition check on every dimension of the fixture knowledge base.
  cstest::TempDir tmp("cs-curate");
  const fs::path config = tmp.path() / "config.json";
  write_json_file(config, fixture_config_json(tmp.path() / "ws"));
  std::string err;
  if (cli({"-q", "-c", config.string(), "build-kb"}, &err) != 0) return fail("build-kb failed: " + err.substr(0, 300));
  std::map<std::string, std::vector<KnowledgeInstance>> by_dim;
  for (const auto& k : read_records<KnowledgeInstance>(tmp.path() / "ws" / "spanish" / "en" / "kb" / "kb.jsonl"))
    if (k.qc_status == QcStatus::kVerified) by_dim[k.dimension_id].push_back(k);
  if (by_dim.empty()) return fail("fixture knowledge base has no verified instances");
  const Schema& schema = cstest::canonical_schema();
  for (const auto& [dim, instances] : by_dim) {
    const auto survivors = dedup(instances, kDefaultDedupThreshold, embed);
    const auto got = cluster_dimension(survivors, embed, chat, "Spanish", schema.at(dim).name);
    std::vector<std::string> ids;
    for (const auto& k : survivors) ids.push_back(k.kb_id);
    if (!cstest::oracle::is_partition(ids, got)) return fail("clustering of " + dim + " is not a partition");
  }

  const std::vector<std::string> festival = {
      "festival fireworks parade bonfire procession lanterns", "bonfire fireworks festival procession music parade",
      "lanterns parade festival fireworks costumes procession", "procession festival bonfire costumes lanterns music",
      "fireworks festival costumes music bonfire parade"};
  const std::vector<std::string> cuisine = {
      "olive oil bread tapas lunch dinner paella", "paella tapas bread dinner saffron rice",
      "lunch dinner olive oil saffron paella", "rice saffron tapas bread olive lunch", "dinner tapas paella rice bread oil"};
  std::vector<KnowledgeInstance> mixed;
  std::map<std::string, std::string> truth_of;
  for (const auto& s : festival) {
    mixed.push_back(cstest::make_instance("dimension.celebration_of_festivals", s));
    truth_of[mixed.back().kb_id] = "festival";
  }
  for (const auto& s : cuisine) {
    mixed.push_back(cstest::make_instance("dimension.celebration_of_festivals", s));
    truth_of[mixed.back().kb_id] = "cuisine";
  }
  const auto assignments = cluster_dimension(mixed, embed, chat, "Spanish", "celebration of festivals");
  std::vector<int> clusters;
  std::vector<std::string> truth;
  for (const auto& a : assignments) {
    clusters.push_back(a.cluster_index);
    truth.push_back(truth_of.at(a.kb_id));
  }
  const double purity = cstest::oracle::purity(clusters, truth);
  const std::string d = "dedup 200 -> " + std::to_string(once.size()) + " idempotent; " +
                        std::to_string(by_dim.size()) + " fixture dimensions partitioned; two-vocabulary purity " +
                        fmt("%.3f", purity);
  return purity == 1.0 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------------------

bool matches_k(std::size_t count, const std::string& shown) {
  // "11.09k" style: round the count to the precision written.
  const auto dot = shown.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(shown.size() - dot - 2);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*fk", decimals, static_cast<double>(count) / 1000.0);
  return shown == buf;
}

Outcome release_replication(std::string& note) {
  const char* env = std::getenv("CULTURESCOPE_RELEASE_DIR");
  if (!env || !*env) {
    note = "released files: SKIP (CULTURESCOPE_RELEASE_DIR not set)";
    return {"SKIP", note};
  }
  const fs::path dir(env);
  struct Expect {
    std::string culture, language;
    std::size_t knowledge;
    std::string questions;
  };
  const std::vector<Expect> expected = {{"spanish", "en", 2767, "11.09k"},
                                        {"spanish", "es", 2483, "10.68k"},
                                        {"chinese", "en", 3177, "11.2k"},
                                        {"chinese", "zh", 3535, "11.2k"}};
  std::string detail;
  bool ok = true;
  for (const auto& e : expected) {
    const fs::path root = dir / e.culture / e.language;
    try {
      const auto kb = read_records<KnowledgeInstance>(root / "kb.jsonl");
      const auto items = read_records<QuestionItem>(root / "items.jsonl");
      const bool good = kb.size() == e.knowledge && matches_k(items.size(), e.questions);
      ok = ok && good;
      detail += " " + e.culture + "/" + e.language + "=" + std::to_string(kb.size()) + "," + std::to_string(items.size());
    } catch (const std::exception& ex) {
      ok = false;
      detail += " " + e.culture + "/" + e.language + " unreadable";
    }
  }
  note = "released files:" + detail;
  return {ok ? "PASS" : "FAIL", note};
}

Outcome main_table_replication() {
  const auto fx = cstest::load_main_table_fixture();
  EvalRun run;
  run.config.model_id = fx.model;
  run.config.language = fx.language;
  run.config.dataset_digest = dataset_digest(fx.items);
  run.config.dataset_ref = "fixture";
  run.config.judge_model_id = "judge";
  run.records = fx.records;
  run.n = static_cast<std::int64_t>(fx.records.size());
  run.accuracy = accuracy(fx.records);
  const auto table = render_main_table({run}, fx.items, cstest::canonical_schema());
  std::string row;
  if (!table.rows.empty())
    for (const auto& c : table.cells(0)) row += (row.empty() ? "" : " ") + c;
  std::string note;
  const Outcome rel = release_replication(note);
  const bool table_ok = table.rows.size() == 1 && table.cells(0) == fx.expected_cells;
  const std::string d = "fixture row [" + row + "] " + (table_ok ? "matches" : "does not match") + "; " + note;
  if (!table_ok || rel.status == "FAIL") return fail(d);
  return pass(d);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"schema fidelity", schema_fidelity},
      {"metric correctness", metric_correctness},
      {"hermetic end-to-end", hermetic_pipeline},
      {"qc discrimination", qc_discrimination},
      {"knowledge injection", injection_sweep_check},
      {"objective parsing", parsing_robustness},
      {"curation properties", curation_properties},
      {"data replication", main_table_replication},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    if (o.status == "FAIL") ++failures;
    std::cout << "criterion " << (i + 1) << " " << o.status << " " << criteria[i].first << ": " << o.detail << "\n";
  }
  std::cout.flush();
  return failures == 0 ? 0 : 1;
}
