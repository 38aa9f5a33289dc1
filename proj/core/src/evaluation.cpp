#include "culturescope/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>

#include "culturescope/digest.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/parallel.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

void EvalRunConfig::validate() const {
  if (model_id.empty()) throw Error(ErrorCode::kConfig, "evaluation requires a model id");
  if (injection_count < 0) throw Error(ErrorCode::kConfig, "injection count must be >= 0");
  if (max_items && *max_items < 0) throw Error(ErrorCode::kConfig, "max_items must be >= 0");
  if (max_output_tokens < 1) throw Error(ErrorCode::kConfig, "max_output_tokens must be >= 1");
  if (workers < 1) throw Error(ErrorCode::kConfig, "workers must be >= 1");
  if (!allow_self_judge && !judge_model_id.empty() && judge_model_id == model_id)
    throw Error(ErrorCode::kConfig, "judge model '" + judge_model_id +
                                        "' is also the candidate; pass the self-judge override to allow this");
}

void to_json(nlohmann::json& j, const EvalRunConfig& c) {
  j = nlohmann::json{{"model_id", c.model_id},
                     {"dataset_ref", c.dataset_ref},
                     {"dataset_digest", c.dataset_digest},
                     {"language", c.language},
                     {"injection_count", c.injection_count},
                     {"judge_model_id", c.judge_model_id},
                     {"seed", c.seed},
                     {"max_output_tokens", c.max_output_tokens},
                     {"allow_self_judge", c.allow_self_judge}};
  j["max_items"] = c.max_items ? nlohmann::json(*c.max_items) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EvalRunConfig& c) {
  c.model_id = j.at("model_id").get<std::string>();
  c.dataset_ref = j.value("dataset_ref", "");
  c.dataset_digest = j.value("dataset_digest", "");
  c.language = j.value("language", "");
  c.injection_count = j.value("injection_count", 0);
  c.judge_model_id = j.value("judge_model_id", "");
  c.seed = j.value("seed", std::uint64_t{0});
  c.max_output_tokens = j.value("max_output_tokens", 1024);
  c.allow_self_judge = j.value("allow_self_judge", false);
  if (j.contains("max_items") && !j["max_items"].is_null()) c.max_items = j["max_items"].get<int>();
}

// Workers and the dataset path do not change outcomes, so they stay out of the digest.
std::string config_digest(const EvalRunConfig& c) {
  nlohmann::json j = c;
  j.erase("dataset_ref");
  return short_digest({dump_line(j)});
}

std::string_view to_string(GradingMode m) { return m == GradingMode::kJudge ? "JUDGE" : "OBJECTIVE_MATCH"; }

void to_json(nlohmann::json& j, const EvalRecord& r) {
  j = nlohmann::json{{"item_id", r.item_id},
                     {"correct", r.correct},
                     {"grading_mode", to_string(r.grading_mode)},
                     {"raw_text", r.raw_text},
                     {"parsed_answer", r.parsed_answer},
                     {"parse_ok", r.parse_ok},
                     {"transport_failed", r.transport_failed},
                     {"undecided", r.undecided},
                     {"references_injected", r.references_injected},
                     {"injection_shortfall", r.injection_shortfall}};
  j["judge_rationale"] = r.judge_rationale ? nlohmann::json(*r.judge_rationale) : nlohmann::json(nullptr);
  j["conflict_flag"] = r.conflict_flag ? nlohmann::json(*r.conflict_flag) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EvalRecord& r) {
  r.item_id = j.at("item_id").get<std::string>();
  r.correct = j.at("correct").get<bool>();
  const std::string mode = j.at("grading_mode").get<std::string>();
  if (mode == "JUDGE")
    r.grading_mode = GradingMode::kJudge;
  else if (mode == "OBJECTIVE_MATCH")
    r.grading_mode = GradingMode::kObjectiveMatch;
  else
    throw Error(ErrorCode::kParse, "unknown grading_mode '" + mode + "'");
  r.raw_text = j.value("raw_text", "");
  r.parsed_answer = j.value("parsed_answer", "");
  r.parse_ok = j.value("parse_ok", true);
  r.transport_failed = j.value("transport_failed", false);
  r.undecided = j.value("undecided", false);
  r.references_injected = j.value("references_injected", 0);
  r.injection_shortfall = j.value("injection_shortfall", 0);
  r.judge_rationale.reset();
  r.conflict_flag.reset();
  if (j.contains("judge_rationale") && !j["judge_rationale"].is_null())
    r.judge_rationale = j["judge_rationale"].get<std::string>();
  if (j.contains("conflict_flag") && !j["conflict_flag"].is_null()) r.conflict_flag = j["conflict_flag"].get<bool>();
}

// ---------------------------------------------------------------------------

BuiltPrompt build_prompt(const QuestionItem& item, const std::vector<std::string>& injection) {
  BuiltPrompt out;
  std::string body = item.question_text + "\n";
  for (const auto& o : item.options) body += o.label + ") " + o.text + "\n";
  body += "\n" + prompts::answer_instruction(item.format, item.language) + "\n";
  if (injection.empty()) {
    out.text = body;
    return out;
  }
  std::string p = "Reference:\n";
  for (std::size_t i = 0; i < injection.size(); ++i)
    p += std::to_string(i + 1) + ". " + text::collapse_whitespace(injection[i]) + "\n";
  p += "\nQuestion:\n" + body;
  out.text = std::move(p);
  out.reference_count = static_cast<int>(injection.size());
  return out;
}

int count_reference_statements(std::string_view prompt) {
  int count = 0;
  bool inside = false;
  for (const auto& line : text::split_lines(prompt)) {
    const std::string t = text::trim(line);
    if (!inside) {
      if (t == "Reference:") inside = true;
      continue;
    }
    if (t == "Question:") break;
    std::size_t d = 0;
    while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
    if (d > 0 && d + 1 < t.size() && t[d] == '.' && t[d + 1] == ' ') ++count;
  }
  return count;
}

std::vector<std::string> select_injection(const QuestionItem& item, const KnowledgeBase& kb, int k) {
  std::vector<std::string> out;
  for (const auto& id : item.knowledge_ids) {
    if (static_cast<int>(out.size()) >= k) break;
    if (const auto* inst = kb.find(id)) out.push_back(inst->statement);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_md(std::string_view s) {
  std::string out(s);
  out.erase(std::remove_if(out.begin(), out.end(), [](char c) { return c == '*' || c == '`' || c == '_'; }),
            out.end());
  return text::trim(out);
}

bool is_label(char c, const std::vector<QuestionOption>& options) {
  const std::string l(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return std::any_of(options.begin(), options.end(), [&](const auto& o) { return o.label == l; });
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80; }

// Letters that follow an answer-announcing phrase.
std::set<std::string> labels_after_phrases(const std::string& lower, const std::vector<QuestionOption>& options) {
  static const std::vector<std::string> kPhrases = {
      "correct answer is", "correct option is", "correct choice is", "the answer is", "answer is", "answer:",
      "i choose", "i pick", "i'd go with", "i would go with", "go with", "respuesta correcta es", "la respuesta es",
      "respuesta:", "opción correcta es", "答案是", "答案为", "答案：", "选择", "应选"};
  std::set<std::string> found;
  for (const auto& ph : kPhrases) {
    for (std::size_t pos = lower.find(ph); pos != std::string::npos; pos = lower.find(ph, pos + 1)) {
      std::size_t j = pos + ph.size();
      auto skip = [&] {
        while (j < lower.size() && (lower[j] == ' ' || lower[j] == ':' || lower[j] == '(' || lower[j] == '"' ||
                                    lower[j] == '\''))
          ++j;
      };
      skip();
      for (std::string_view filler : {"option ", "opción ", "choice ", "letter ", "la ", "el ", "选项"}) {
        if (std::string_view(lower).substr(j).starts_with(filler)) {
          j += filler.size();
          skip();
        }
      }
      if (j < lower.size() && std::isalpha(static_cast<unsigned char>(lower[j])) &&
          (j + 1 == lower.size() || !word_char(lower[j + 1])) && is_label(lower[j], options))
        found.insert(std::string(1, static_cast<char>(std::toupper(lower[j]))));
    }
  }
  return found;
}

// Explicit label references: "(X)", "X)", "option X", and X joined by or/and.
std::set<std::string> label_mentions(const std::string& s, const std::vector<QuestionOption>& options) {
  std::set<std::string> found;
  const std::string lower = text::to_lower(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (!std::isalpha(static_cast<unsigned char>(c)) || !is_label(c, options)) continue;
    const bool left_ok = i == 0 || !word_char(s[i - 1]);
    const bool right_ok = i + 1 == s.size() || !word_char(s[i + 1]);
    if (!left_ok || !right_ok) continue;
    const std::string label(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    const bool upper = std::isupper(static_cast<unsigned char>(c));
    const std::string_view before = std::string_view(lower).substr(0, i);
    const std::string_view after = std::string_view(lower).substr(i + 1);
    bool mention = false;
    if (i > 0 && s[i - 1] == '(' && after.starts_with(")")) mention = true;
    if (after.starts_with(")") && (i == 0 || !word_char(s[i - 1]))) mention = true;
    for (std::string_view w : {"option ", "opción ", "choice ", "options ", "opciones ", "选项"})
      if (before.ends_with(w)) mention = true;
    if (upper) {
      for (std::string_view w : {"or ", "and ", "o ", "y ", "nor ", "either ", "both ", "或", "和", ", ", "/"})
        if (before.ends_with(w)) mention = true;
      for (std::string_view w : {" or", " and", " o ", " y ", "/", " nor", "或", "和"})
        if (after.starts_with(w)) mention = true;
      if (s.size() == 1 || text::trim(s).size() == 1) mention = true;
    }
    if (mention) found.insert(label);
  }
  for (const auto& l : labels_after_phrases(lower, options)) found.insert(l);
  return found;
}

std::optional<std::string> parse_choice(std::string_view raw, const std::vector<QuestionOption>& options) {
  const std::string s = strip_md(raw);
  if (s.empty() || options.empty()) return std::nullopt;
  const auto mentions = label_mentions(s, options);
  if (mentions.size() > 1) return std::nullopt;

  // 1. exact label
  std::string bare = s;
  while (!bare.empty() && std::string_view("([").find(bare.front()) != std::string_view::npos) bare.erase(0, 1);
  while (!bare.empty() && std::string_view(")].:!,;").find(bare.back()) != std::string_view::npos) bare.pop_back();
  bare = text::trim(bare);
  if (bare.size() == 1 && is_label(bare[0], options))
    return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(bare[0]))));

  // 2. leading label followed by punctuation
  {
    std::size_t i = 0;
    if (s[i] == '(' || s[i] == '[') ++i;
    if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i])) && is_label(s[i], options)) {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] == ' ') ++j;
      if (j < s.size() && std::string_view(").:-],").find(s[j]) != std::string_view::npos &&
          (j == i + 1 || s[j] != '.'))
        return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(s[i]))));
    }
  }

  // 3. "answer is X"
  const std::string lower = text::to_lower(s);
  if (const auto announced = labels_after_phrases(lower, options); announced.size() == 1) return *announced.begin();

  // 4. a single explicit mention
  if (mentions.size() == 1) return *mentions.begin();

  // 5. unique option-text containment
  const std::string norm = text::normalize_for_match(s);
  std::optional<std::string> hit;
  for (const auto& o : options) {
    std::string t = text::normalize_for_match(o.text);
    while (!t.empty() && std::string_view(".!;,").find(t.back()) != std::string_view::npos) t.pop_back();
    if (t.size() < 2 || norm.find(t) == std::string::npos) continue;
    if (hit) return std::nullopt;
    hit = o.label;
  }
  return hit;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

std::optional<std::string> parse_truth(std::string_view raw) {
  const std::string s = strip_md(raw);
  if (s.empty()) return std::nullopt;
  if (auto lead = parse_truth_token(s)) return *lead ? "true" : "false";
  std::string lower = text::to_lower(s);
  for (std::string_view neg : {"not true", "isn't true", "is not correct", "not correct", "untrue", "no es cierto",
                               "no es verdad", "no es correcto", "不正确", "不对"})
    replace_all(lower, neg, " false ");
  if (auto lead = parse_truth_token(lower)) return *lead ? "true" : "false";
  static const std::set<std::string> kTrue = {"true", "correct", "verdadero", "verdadera", "cierto", "cierta"};
  static const std::set<std::string> kFalse = {"false", "incorrect", "falso", "falsa", "wrong"};
  bool t = false, f = false;
  for (const auto& tok : text::tokenize(lower)) {
    if (kTrue.count(tok)) t = true;
    if (kFalse.count(tok)) f = true;
  }
  if (lower.find("正确") != std::string::npos) t = true;
  if (lower.find("错误") != std::string::npos) f = true;
  if (t == f) return std::nullopt;
  return t ? "true" : "false";
}

}  // namespace

std::optional<std::string> parse_objective(std::string_view raw_text, FormatType format,
                                           const std::vector<QuestionOption>& options) {
  if (format == FormatType::kTrueFalse) return parse_truth(raw_text);
  if (format == FormatType::kMultipleChoice) return parse_choice(raw_text, options);
  throw Error(ErrorCode::kPrecondition, "parse_objective called for a subjective format");
}

ModelResponse ask_model(const QuestionItem& item, const std::vector<std::string>& injection, ChatProvider& chat,
                        const EvalRunConfig& config) {
  ModelResponse r;
  r.item_id = item.item_id;
  ChatRequest req;
  req.user_text = build_prompt(item, injection).text;
  req.language = item.language;
  req.max_output_tokens = config.max_output_tokens;
  req.task = LlmTask::kAnswer;
  try {
    r.raw_text = chat.chat(req).text;
  } catch (const Error&) {
    r.transport_failed = true;
    r.parse_ok = !is_objective(item.format);
    return r;
  }
  if (is_objective(item.format)) {
    const auto parsed = parse_objective(r.raw_text, item.format, item.options);
    r.parse_ok = parsed.has_value();
    r.parsed_answer = parsed.value_or("");
  } else {
    r.parse_ok = true;
    r.parsed_answer = text::trim(r.raw_text);
  }
  return r;
}

JudgeOutcome judge_subjective(std::string_view question, std::string_view reference_answer,
                              std::string_view test_answer, ChatProvider& chat) {
  JudgeOutcome out;
  if (text::trim(test_answer).empty()) {
    out.rationale = "empty answer";
    return out;
  }
  static const std::vector<std::string> kTokens = {"CORRECT", "INCORRECT"};
  ChatRequest req;
  req.user_text = prompts::judge_prompt(question, reference_answer, test_answer);
  req.max_output_tokens = 256;
  req.task = LlmTask::kJudge;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ChatResponse resp = chat.chat(req);
    const auto token = prompts::parse_verdict_token(resp.text, kTokens);
    if (!token) continue;
    const std::string conflict = text::to_lower(prompts::line_value(resp.text, "Conflict:"));
    if (conflict.starts_with("yes"))
      out.conflict = true;
    else if (conflict.starts_with("no"))
      out.conflict = false;
    out.correct = *token == "CORRECT" && out.conflict != true;
    out.rationale = prompts::rationale_after_verdict(resp.text);
    return out;
  }
  out.undecided = true;
  out.rationale = "judge verdict could not be parsed after one retry";
  return out;
}

double accuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::kUndefinedMetric, "accuracy is undefined for an empty record set");
  std::int64_t correct = 0;
  for (const auto& r : records) correct += r.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------

std::string_view to_string(GroupKey k) {
  switch (k) {
    case GroupKey::kLanguage: return "language";
    case GroupKey::kLayer: return "layer";
    case GroupKey::kCategory: return "category";
    case GroupKey::kTopicAspect: return "topic_aspect";
    case GroupKey::kContentType: return "content_type";
    case GroupKey::kFormat: return "format";
  }
  return "?";
}

std::optional<GroupKey> parse_group_key(std::string_view s) {
  for (auto k : kAllGroupKeys)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::vector<GroupRow> group_accuracy(const std::vector<EvalRecord>& records, const std::vector<QuestionItem>& items,
                                     const Schema& schema, GroupKey key) {
  std::unordered_map<std::string, const QuestionItem*> by_id;
  for (const auto& it : items) by_id.emplace(it.item_id, &it);
  std::unordered_map<std::string, std::size_t> node_order;
  for (std::size_t i = 0; i < schema.nodes().size(); ++i) node_order.emplace(schema.nodes()[i].node_id, i);
  if (key == GroupKey::kCategory) {
    const auto cats = schema.report_categories();
    for (std::size_t i = 0; i < cats.size(); ++i) node_order[cats[i]->node_id] = i;
  }

  struct Acc {
    std::string label;
    std::size_t order = 0;
    std::int64_t n = 0, correct = 0;
  };
  std::map<std::string, Acc> groups;
  for (const auto& r : records) {
    auto it = by_id.find(r.item_id);
    if (it == by_id.end()) throw Error(ErrorCode::kIntegrity, "record " + r.item_id + " has no matching dataset item");
    const QuestionItem& item = *it->second;
    std::string group, label;
    std::size_t order = 0;
    auto hierarchy = [&](Level level) {
      if (!schema.find(item.dimension_id))
        throw Error(ErrorCode::kIntegrity, "item " + item.item_id + " references dimension " + item.dimension_id +
                                               " absent from schema version " + schema.version());
      const auto* node = schema.ancestor(item.dimension_id, level);
      if (!node)
        throw Error(ErrorCode::kIntegrity, "dimension " + item.dimension_id + " has no " +
                                               std::string(to_string(level)) + " ancestor");
      group = node->node_id;
      label = !node->abbrev.empty() ? node->abbrev : node->name;
      order = node_order[node->node_id];
    };
    switch (key) {
      case GroupKey::kLanguage:
        group = label = item.language;
        break;
      case GroupKey::kLayer: hierarchy(Level::kLayer); break;
      case GroupKey::kCategory: hierarchy(Level::kCategory); break;
      case GroupKey::kTopicAspect: hierarchy(Level::kTopicAspect); break;
      case GroupKey::kContentType:
        group = label = std::string(to_string(item.content_type));
        order = static_cast<std::size_t>(item.content_type);
        break;
      case GroupKey::kFormat:
        group = label = std::string(to_string(item.format));
        order = static_cast<std::size_t>(item.format);
        break;
    }
    auto& a = groups[group];
    a.label = label;
    a.order = order;
    ++a.n;
    a.correct += r.correct ? 1 : 0;
  }
  std::vector<GroupRow> rows;
  std::vector<std::size_t> orders;
  for (const auto& [g, a] : groups) {
    rows.push_back({g, a.label, a.n, a.correct, static_cast<double>(a.correct) / static_cast<double>(a.n)});
    orders.push_back(a.order);
  }
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return orders[a] < orders[b]; });
  std::vector<GroupRow> sorted;
  for (auto i : idx) sorted.push_back(rows[i]);
  return sorted;
}

void to_json(nlohmann::json& j, const PromptLogEntry& e) {
  j = nlohmann::json{{"item_id", e.item_id},
                     {"requested_k", e.requested_k},
                     {"reference_count", e.reference_count},
                     {"shortfall", e.shortfall},
                     {"prompt", e.prompt}};
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json log_line(const EvalRecord& r, const std::string& digest) {
  nlohmann::json j = r;
  j["config_digest"] = digest;
  return j;
}

std::vector<EvalRecord> read_log(const std::filesystem::path& path, const std::string& digest) {
  std::vector<EvalRecord> out;
  for (const auto& row : read_jsonl(path)) {
    if (row.value("config_digest", "") != digest)
      throw Error(ErrorCode::kIntegrity, "run log " + path.string() + " belongs to a different run configuration");
    out.push_back(row.get<EvalRecord>());
  }
  return out;
}

}  // namespace

EvalRun evaluate(const std::vector<QuestionItem>& items, const KnowledgeBase& kb, ChatProvider& model,
                 ChatProvider* judge, const EvalRunConfig& config, const EvalOptions& options) {
  config.validate();
  std::vector<const QuestionItem*> selected;
  for (const auto& it : items) selected.push_back(&it);
  std::sort(selected.begin(), selected.end(), [](auto* a, auto* b) { return a->item_id < b->item_id; });
  if (config.max_items && static_cast<std::size_t>(*config.max_items) < selected.size()) {
    Rng rng(substream_seed(config.seed, "evaluate:subset"));
    std::vector<const QuestionItem*> subset;
    for (auto i : rng.sample_without_replacement(selected.size(), static_cast<std::size_t>(*config.max_items)))
      subset.push_back(selected[i]);
    std::sort(subset.begin(), subset.end(), [](auto* a, auto* b) { return a->item_id < b->item_id; });
    selected = std::move(subset);
  }
  const bool needs_judge =
      std::any_of(selected.begin(), selected.end(), [](auto* it) { return !is_objective(it->format); });
  if (needs_judge && !judge) throw Error(ErrorCode::kPrecondition, "subjective items require a judge provider");

  const std::string digest = config_digest(config);
  std::map<std::string, EvalRecord> done;
  if (!options.run_log.empty() && std::filesystem::exists(options.run_log)) {
    std::set<std::string> wanted;
    for (auto* it : selected) wanted.insert(it->item_id);
    for (auto& r : read_log(options.run_log, digest))
      if (wanted.count(r.item_id)) done.emplace(r.item_id, std::move(r));
  }
  std::vector<const QuestionItem*> pending;
  for (auto* it : selected)
    if (!done.count(it->item_id)) pending.push_back(it);

  std::mutex log_mu;
  if (!options.run_log.empty() && !options.run_log.parent_path().empty())
    std::filesystem::create_directories(options.run_log.parent_path());
  const auto fresh = parallel_map(pending, static_cast<std::size_t>(config.workers), [&](const QuestionItem* item) {
    const auto injection = select_injection(*item, kb, config.injection_count);
    EvalRecord rec;
    rec.item_id = item->item_id;
    rec.references_injected = static_cast<int>(injection.size());
    rec.injection_shortfall = config.injection_count - rec.references_injected;
    if (options.prompt_log) {
      const auto prompt = build_prompt(*item, injection);
      std::lock_guard lock(log_mu);
      options.prompt_log->push_back(
          {item->item_id, config.injection_count, prompt.reference_count, rec.injection_shortfall, prompt.text});
    }
    const ModelResponse resp = ask_model(*item, injection, model, config);
    rec.raw_text = resp.raw_text;
    rec.parsed_answer = resp.parsed_answer;
    rec.parse_ok = resp.parse_ok;
    rec.transport_failed = resp.transport_failed;
    if (is_objective(item->format)) {
      rec.grading_mode = GradingMode::kObjectiveMatch;
      rec.correct = resp.parse_ok && !resp.transport_failed && resp.parsed_answer == item->reference_answer;
    } else {
      rec.grading_mode = GradingMode::kJudge;
      if (!resp.transport_failed) {
        try {
          const auto verdict = judge_subjective(item->question_text, item->reference_answer, resp.parsed_answer, *judge);
          rec.correct = verdict.correct;
          rec.judge_rationale = verdict.rationale;
          rec.conflict_flag = verdict.conflict;
          rec.undecided = verdict.undecided;
        } catch (const Error& e) {
          rec.correct = false;
          rec.undecided = true;
          rec.judge_rationale = std::string("judge call failed: ") + e.what();
        }
      }
    }
    if (!options.run_log.empty()) {
      std::lock_guard lock(log_mu);
      append_jsonl(options.run_log, log_line(rec, digest));
    }
    return rec;
  });

  EvalRun run;
  run.config = config;
  for (auto& [id, r] : done) run.records.push_back(r);
  run.records.insert(run.records.end(), fresh.begin(), fresh.end());
  std::sort(run.records.begin(), run.records.end(), [](const auto& a, const auto& b) { return a.item_id < b.item_id; });
  run.n = static_cast<std::int64_t>(run.records.size());
  run.accuracy = run.records.empty() ? 0.0 : accuracy(run.records);
  if (options.prompt_log)
    std::sort(options.prompt_log->begin(), options.prompt_log->end(),
              [](const auto& a, const auto& b) { return a.item_id < b.item_id; });
  if (!options.run_log.empty()) {
    std::vector<nlohmann::json> rows;
    for (const auto& r : run.records) rows.push_back(log_line(r, digest));
    write_jsonl(options.run_log, rows);
  }
  return run;
}

std::vector<EvalRun> injection_sweep(const std::vector<QuestionItem>& items, const KnowledgeBase& kb,
                                     const std::vector<int>& ks, ChatProvider& model, ChatProvider* judge,
                                     const EvalRunConfig& config, const std::filesystem::path& run_dir,
                                     std::map<int, std::vector<PromptLogEntry>>* prompt_logs) {
  if (ks.empty()) throw Error(ErrorCode::kPrecondition, "injection sweep needs at least one k");
  for (int k : ks)
    if (k < 0) throw Error(ErrorCode::kPrecondition, "injection k must be >= 0");
  std::vector<EvalRun> runs;
  for (int k : ks) {
    EvalRunConfig cfg = config;
    cfg.injection_count = k;
    EvalOptions opts;
    if (!run_dir.empty()) opts.run_log = run_dir / ("k" + std::to_string(k)) / "records.jsonl";
    if (prompt_logs) opts.prompt_log = &(*prompt_logs)[k];
    runs.push_back(evaluate(items, kb, model, judge, cfg, opts));
  }
  return runs;
}

nlohmann::json run_summary_json(const EvalRun& run) {
  std::int64_t correct = 0, transport = 0, unparsed = 0, undecided = 0, shortfall = 0;
  for (const auto& r : run.records) {
    correct += r.correct;
    transport += r.transport_failed;
    unparsed += !r.parse_ok;
    undecided += r.undecided;
    shortfall += r.injection_shortfall;
  }
  return nlohmann::json{{"config", run.config},           {"config_digest", config_digest(run.config)},
                        {"n", run.n},                     {"correct", correct},
                        {"accuracy", run.accuracy},       {"transport_failed", transport},
                        {"unparsed", unparsed},           {"undecided", undecided},
                        {"injection_shortfall", shortfall}};
}

void save_run(const EvalRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string digest = config_digest(run.config);
  std::vector<nlohmann::json> rows;
  for (const auto& r : run.records) rows.push_back(log_line(r, digest));
  write_jsonl(dir / "records.jsonl", rows);
  write_json_file(dir / "summary.json", run_summary_json(run));
}

EvalRun load_run(const std::filesystem::path& dir) {
  const nlohmann::json summary = read_json_file(dir / "summary.json");
  EvalRun run;
  run.config = summary.at("config").get<EvalRunConfig>();
  run.records = read_log(dir / "records.jsonl", config_digest(run.config));
  run.n = static_cast<std::int64_t>(run.records.size());
  run.accuracy = run.records.empty() ? 0.0 : accuracy(run.records);
  if (summary.at("n").get<std::int64_t>() != run.n || summary.at("accuracy").get<double>() != run.accuracy)
    throw Error(ErrorCode::kIntegrity, "run summary in " + dir.string() + " disagrees with its records");
  return run;
}

}  // namespace culturescope
