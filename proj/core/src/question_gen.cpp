#include "culturescope/question_gen.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "culturescope/digest.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/parallel.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

void to_json(nlohmann::json& j, const QuestionItem& q) {
  nlohmann::json options = nlohmann::json::array();
  for (const auto& o : q.options) options.push_back({{"label", o.label}, {"text", o.text}});
  j = nlohmann::json{{"item_id", q.item_id},
                     {"culture", q.culture},
                     {"language", q.language},
                     {"content_type", to_string(q.content_type)},
                     {"format", to_string(q.format)},
                     {"question_text", q.question_text},
                     {"options", options},
                     {"reference_answer", q.reference_answer},
                     {"knowledge_ids", q.knowledge_ids},
                     {"dimension_id", q.dimension_id},
                     {"qc_status", to_string(q.qc_status)},
                     {"qc_reason", q.qc_reason},
                     {"qc_rationale", q.qc_rationale}};
}

void from_json(const nlohmann::json& j, QuestionItem& q) {
  q.item_id = j.at("item_id").get<std::string>();
  q.culture = j.at("culture").get<std::string>();
  q.language = j.at("language").get<std::string>();
  const auto type = parse_content_type(j.at("content_type").get<std::string>());
  const auto format = parse_format(j.at("format").get<std::string>());
  const auto qc = parse_qc_status(j.value("qc_status", "PENDING"));
  if (!type || !format || !qc) throw Error(ErrorCode::kParse, "bad enum value in question item " + q.item_id);
  q.content_type = *type;
  q.format = *format;
  q.qc_status = *qc;
  q.question_text = j.at("question_text").get<std::string>();
  q.options.clear();
  for (const auto& o : j.value("options", nlohmann::json::array()))
    q.options.push_back({o.at("label").get<std::string>(), o.at("text").get<std::string>()});
  q.reference_answer = j.at("reference_answer").get<std::string>();
  q.knowledge_ids = j.at("knowledge_ids").get<std::vector<std::string>>();
  q.dimension_id = j.at("dimension_id").get<std::string>();
  q.qc_reason = j.value("qc_reason", "");
  q.qc_rationale = j.value("qc_rationale", "");
}

void check_item(const QuestionItem& item) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::kIntegrity, "item " + item.item_id + ": " + why); };
  if (text::trim(item.question_text).empty()) fail("empty question text");
  if (item.knowledge_ids.empty()) fail("no linked knowledge");
  switch (item.format) {
    case FormatType::kMultipleChoice: {
      if (item.options.size() < 2) fail("multiple choice needs at least two options");
      std::set<std::string> labels;
      for (const auto& o : item.options)
        if (!labels.insert(o.label).second) fail("duplicate option label " + o.label);
      if (!labels.count(item.reference_answer)) fail("reference answer is not an option label");
      break;
    }
    case FormatType::kTrueFalse:
      if (!item.options.empty()) fail("true/false items carry no options");
      if (item.reference_answer != "true" && item.reference_answer != "false") fail("answer must be true or false");
      break;
    case FormatType::kShortAnswer:
    case FormatType::kEssay:
      if (!item.options.empty()) fail("subjective items carry no options");
      if (text::trim(item.reference_answer).empty()) fail("empty reference answer");
      break;
  }
}

std::string make_item_id(std::string_view culture, std::string_view language, ContentType type,
                         std::vector<std::string> knowledge_ids, std::string_view question_text) {
  std::sort(knowledge_ids.begin(), knowledge_ids.end());
  return short_digest({culture, language, to_string(type), text::join(knowledge_ids, ","),
                       text::collapse_whitespace(question_text)});
}

// ---------------------------------------------------------------------------

KnowledgeBase::KnowledgeBase(std::vector<KnowledgeInstance> instances) : instances_(std::move(instances)) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    index_.emplace(instances_[i].kb_id, i);
  }
  std::vector<const KnowledgeInstance*> sorted;
  for (const auto& k : instances_) sorted.push_back(&k);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->kb_id < b->kb_id; });
  for (auto* k : sorted) {
    parts.push_back(k->kb_id);
    parts.push_back(k->statement);
    parts.emplace_back(to_string(k->qc_status));
  }
  version_ = short_digest(parts);
}

const KnowledgeInstance* KnowledgeBase::find(std::string_view kb_id) const {
  auto it = index_.find(std::string(kb_id));
  return it == index_.end() ? nullptr : &instances_[it->second];
}

std::vector<const KnowledgeInstance*> KnowledgeBase::verified(const std::optional<std::string>& dimension_id) const {
  std::vector<const KnowledgeInstance*> out;
  for (const auto& k : instances_)
    if (k.qc_status == QcStatus::kVerified && (!dimension_id || k.dimension_id == *dimension_id)) out.push_back(&k);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->kb_id < b->kb_id; });
  return out;
}

std::vector<std::string> KnowledgeBase::verified_dimensions() const {
  std::set<std::string> dims;
  for (const auto& k : instances_)
    if (k.qc_status == QcStatus::kVerified) dims.insert(k.dimension_id);
  return {dims.begin(), dims.end()};
}

// ---------------------------------------------------------------------------

std::vector<FormatType> default_formats(ContentType type) {
  switch (type) {
    case ContentType::kFactual:
      return {FormatType::kMultipleChoice, FormatType::kTrueFalse, FormatType::kShortAnswer};
    case ContentType::kConceptual:
    case ContentType::kMisleading:
      return {FormatType::kMultipleChoice, FormatType::kTrueFalse};
    case ContentType::kMultiHop:
      return {FormatType::kMultipleChoice, FormatType::kShortAnswer, FormatType::kEssay};
  }
  return {};
}

int default_context_k(ContentType type) { return type == ContentType::kMultiHop ? 5 : 3; }

int GenerationPlan::count(ContentType type) const {
  if (!items_per_type.empty()) {
    auto it = items_per_type.find(type);
    return it == items_per_type.end() ? 0 : it->second;
  }
  return total_items / static_cast<int>(kAllContentTypes.size());
}

std::vector<FormatType> GenerationPlan::allowed_formats(ContentType type) const {
  auto it = formats.find(type);
  return it == formats.end() ? default_formats(type) : it->second;
}

int GenerationPlan::k_for(ContentType type) const {
  auto it = context_k.find(type);
  return it == context_k.end() ? default_context_k(type) : it->second;
}

int GenerationPlan::budget_for(ContentType type) const {
  const int n = count(type);
  return n + (retry_budget >= 0 ? retry_budget : std::max(10, 2 * n));
}

void GenerationPlan::validate() const {
  if (total_items < 0) throw Error(ErrorCode::kConfig, "plan total_items must be >= 0");
  if (items_per_type.empty()) {
    if (total_items % static_cast<int>(kAllContentTypes.size()) != 0)
      throw Error(ErrorCode::kConfig, "plan total_items must split evenly over the four content types, got " +
                                          std::to_string(total_items));
  } else {
    int sum = 0;
    for (const auto& [t, n] : items_per_type) {
      if (n < 0) throw Error(ErrorCode::kConfig, "negative item count for " + std::string(to_string(t)));
      sum += n;
    }
    if (sum != total_items)
      throw Error(ErrorCode::kConfig, "items_per_type sums to " + std::to_string(sum) + " but total_items is " +
                                          std::to_string(total_items));
  }
  for (const auto& [t, fs] : formats)
    if (fs.empty()) throw Error(ErrorCode::kConfig, "no formats allowed for " + std::string(to_string(t)));
  for (const auto& [t, k] : context_k)
    if (k < 1) throw Error(ErrorCode::kConfig, "context k must be >= 1 for " + std::string(to_string(t)));
  if (workers < 1) throw Error(ErrorCode::kConfig, "plan workers must be >= 1");
}

namespace {

ContentType require_type(const std::string& s) {
  auto t = parse_content_type(s);
  if (!t) throw Error(ErrorCode::kConfig, "unknown content type '" + s + "' in plan");
  return *t;
}

}  // namespace

GenerationPlan plan_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {"culture", "language", "total_items", "items_per_type", "formats",
                                              "context_k", "seed", "retry_budget", "workers"};
  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw Error(ErrorCode::kConfig, "unknown plan field '" + key + "'");
  GenerationPlan p;
  p.culture = j.value("culture", "");
  p.language = j.value("language", "");
  p.total_items = j.value("total_items", 0);
  p.seed = j.value("seed", std::uint64_t{0});
  p.retry_budget = j.value("retry_budget", -1);
  p.workers = j.value("workers", 4);
  if (j.contains("items_per_type"))
    for (const auto& [t, n] : j["items_per_type"].items()) p.items_per_type[require_type(t)] = n.get<int>();
  if (j.contains("formats")) {
    for (const auto& [t, list] : j["formats"].items()) {
      std::vector<FormatType> fs;
      for (const auto& f : list) {
        auto parsed = parse_format(f.get<std::string>());
        if (!parsed) throw Error(ErrorCode::kConfig, "unknown format '" + f.get<std::string>() + "' in plan");
        fs.push_back(*parsed);
      }
      p.formats[require_type(t)] = fs;
    }
  }
  if (j.contains("context_k"))
    for (const auto& [t, k] : j["context_k"].items()) p.context_k[require_type(t)] = k.get<int>();
  p.validate();
  return p;
}

nlohmann::json plan_to_json(const GenerationPlan& p) {
  nlohmann::json per_type = nlohmann::json::object(), formats = nlohmann::json::object(),
                 ks = nlohmann::json::object();
  for (auto t : kAllContentTypes) {
    const std::string name(to_string(t));
    per_type[name] = p.count(t);
    std::vector<std::string> fs;
    for (auto f : p.allowed_formats(t)) fs.emplace_back(to_string(f));
    formats[name] = fs;
    ks[name] = p.k_for(t);
  }
  return nlohmann::json{{"culture", p.culture},       {"language", p.language},        {"total_items", p.total_items},
                        {"items_per_type", per_type}, {"formats", formats},            {"context_k", ks},
                        {"seed", p.seed},             {"retry_budget", p.retry_budget}, {"workers", p.workers}};
}

// ---------------------------------------------------------------------------

ContextSample sample_context(const KnowledgeBase& kb, const Schema& schema,
                             const std::optional<std::string>& dimension_id, std::size_t k, Rng& rng) {
  if (k < 1) throw Error(ErrorCode::kPrecondition, "sample_context requires k >= 1");
  ContextSample out;
  auto draw = [&](const std::vector<const KnowledgeInstance*>& pool, std::size_t want) {
    for (std::size_t idx : rng.sample_without_replacement(pool.size(), std::min(want, pool.size())))
      out.instances.push_back(*pool[idx]);
  };
  if (!dimension_id) {
    const auto pool = kb.verified();
    if (pool.empty()) throw Error(ErrorCode::kSampling, "knowledge base has no VERIFIED instances");
    draw(pool, k);
    out.shortfall = k - out.instances.size();
    return out;
  }
  const auto own = kb.verified(*dimension_id);
  draw(own, k);
  if (out.instances.size() < k) {
    std::vector<const KnowledgeInstance*> neighbours;
    if (const auto* aspect = schema.ancestor(*dimension_id, Level::kTopicAspect)) {
      for (const auto* cand : kb.verified())
        if (cand->dimension_id != *dimension_id && schema.is_within(cand->dimension_id, aspect->node_id))
          neighbours.push_back(cand);
    }
    if (!neighbours.empty()) {
      out.fallback = true;
      draw(neighbours, k - out.instances.size());
    }
  }
  if (out.instances.empty())
    throw Error(ErrorCode::kSampling, "no VERIFIED instances for dimension " + *dimension_id + " or its topic aspect");
  out.shortfall = k - out.instances.size();
  return out;
}

ContextSample sample_context(const KnowledgeBase& kb, const Schema& schema,
                             const std::optional<std::string>& dimension_id, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  return sample_context(kb, schema, dimension_id, k, rng);
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_markdown(std::string_view line) {
  std::string s = text::trim(line);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '*' || c == '`'; }), s.end());
  while (!s.empty() && s.front() == '#') s.erase(0, 1);
  return text::trim(s);
}

// Returns the text after a matching header, or nullopt.
std::optional<std::string> header_rest(const std::string& line, const std::vector<std::string_view>& headers) {
  for (auto h : headers) {
    if (!text::starts_with_ci(line, h)) continue;
    std::string_view rest = std::string_view(line).substr(h.size());
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (rest.starts_with(":")) {
      rest.remove_prefix(1);
    } else if (rest.starts_with("：")) {
      rest.remove_prefix(std::string_view("：").size());
    } else {
      continue;
    }
    return text::trim(rest);
  }
  return std::nullopt;
}

const std::vector<std::string_view> kQuestionHeaders = {"question", "pregunta", "问题", "题目"};
const std::vector<std::string_view> kAnswerHeaders = {"reference answer", "respuesta de referencia", "参考答案",
                                                      "answer", "respuesta", "答案"};

std::optional<QuestionOption> parse_option_line(std::string_view raw) {
  std::string s = strip_markdown(raw);
  if (s.starts_with("- ")) s = text::trim(std::string_view(s).substr(2));
  std::size_t i = 0;
  if (i < s.size() && s[i] == '(') ++i;
  if (i >= s.size()) return std::nullopt;
  const char c = s[i];
  const bool upper = c >= 'A' && c <= 'H';
  const bool lower = c >= 'a' && c <= 'h';
  if (!upper && !lower) return std::nullopt;
  ++i;
  if (i >= s.size()) return std::nullopt;
  const char punct = s[i];
  if (!(punct == ')' || (upper && (punct == '.' || punct == ':')))) return std::nullopt;
  ++i;
  if (i >= s.size() || s[i] != ' ') return std::nullopt;
  const std::string rest = text::trim(std::string_view(s).substr(i));
  if (rest.empty()) return std::nullopt;
  return QuestionOption{std::string(1, static_cast<char>(std::toupper(c))), rest};
}

std::optional<std::string> answer_letter(std::string_view answer, const std::vector<QuestionOption>& options) {
  std::string s = strip_markdown(answer);
  for (std::string_view prefix : {"the answer is", "answer is", "la respuesta es", "答案是", "option", "opción"}) {
    if (text::starts_with_ci(s, prefix)) s = text::trim(std::string_view(s).substr(prefix.size()));
  }
  std::size_t i = 0;
  if (i < s.size() && s[i] == '(') ++i;
  if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
    const bool alone = i + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1]));
    const std::string label(1, static_cast<char>(std::toupper(s[i])));
    if (alone)
      for (const auto& o : options)
        if (o.label == label) return label;
  }
  const std::string norm = text::normalize_for_match(s);
  std::optional<std::string> hit;
  for (const auto& o : options) {
    if (text::normalize_for_match(o.text) == norm) return o.label;
    if (!norm.empty() && text::normalize_for_match(o.text).find(norm) != std::string::npos) {
      if (hit) return std::nullopt;
      hit = o.label;
    }
  }
  return hit;
}

}  // namespace

std::optional<bool> parse_truth_token(std::string_view raw) {
  std::string s = text::to_lower(strip_markdown(raw));
  s = text::trim(s);
  for (std::string_view prefix : {"the answer is", "answer:", "respuesta:", "答案："}) {
    if (s.starts_with(prefix)) s = text::trim(std::string_view(s).substr(prefix.size()));
  }
  for (std::string_view neg : {"不正确", "不对", "错误", "错", "否"})
    if (s.starts_with(neg)) return false;
  for (std::string_view pos : {"正确", "对", "是"})
    if (s.starts_with(pos)) return true;
  std::size_t end = 0;
  while (end < s.size() && (std::isalpha(static_cast<unsigned char>(s[end])) || static_cast<unsigned char>(s[end]) >= 0x80))
    ++end;
  const std::string token = s.substr(0, end);
  static const std::set<std::string> kTrue = {"true", "yes", "correct", "verdadero", "verdadera", "cierto", "sí", "si"};
  static const std::set<std::string> kFalse = {"false", "no", "incorrect", "falso", "falsa"};
  if (kTrue.count(token)) return true;
  if (kFalse.count(token)) return false;
  return std::nullopt;
}

ParsedQuestion parse_generated(std::string_view model_text, FormatType format) {
  std::vector<std::string> question_lines, answer_lines;
  int state = 0;  // 0 before Question, 1 in question, 2 in answer
  bool saw_question = false, saw_answer = false;
  for (const auto& raw : text::split_lines(model_text)) {
    const std::string s = strip_markdown(raw);
    if (state < 2) {
      if (auto rest = header_rest(s, kAnswerHeaders)) {
        saw_answer = true;
        state = 2;
        if (!rest->empty()) answer_lines.push_back(*rest);
        continue;
      }
    }
    if (state == 0) {
      if (auto rest = header_rest(s, kQuestionHeaders)) {
        saw_question = true;
        state = 1;
        if (!rest->empty()) question_lines.push_back(*rest);
      }
      continue;
    }
    if (state == 1) {
      question_lines.push_back(raw);
    } else {
      answer_lines.push_back(raw);
    }
  }
  if (!saw_question) throw Error(ErrorCode::kParse, "generated text has no 'Question:' section");
  if (!saw_answer) throw Error(ErrorCode::kParse, "generated text has no 'Reference Answer:' section");

  ParsedQuestion out;
  const std::string answer = text::trim(text::join(answer_lines, "\n"));
  std::vector<std::string> stem;
  if (format == FormatType::kMultipleChoice) {
    std::set<std::string> labels;
    for (const auto& l : question_lines) {
      if (auto opt = parse_option_line(l)) {
        if (!labels.insert(opt->label).second)
          throw Error(ErrorCode::kParse, "duplicate option label " + opt->label);
        out.options.push_back(*opt);
      } else if (!text::trim(l).empty()) {
        stem.push_back(text::trim(l));
      }
    }
    if (out.options.size() < 2) throw Error(ErrorCode::kParse, "multiple-choice question has fewer than two options");
    const auto first_line = text::split_lines(answer);
    const auto letter = answer_letter(first_line.empty() ? "" : first_line.front(), out.options);
    if (!letter) throw Error(ErrorCode::kParse, "reference answer does not name an option: '" + answer + "'");
    out.reference_answer = *letter;
  } else {
    for (const auto& l : question_lines)
      if (!text::trim(l).empty()) stem.push_back(text::trim(l));
    if (format == FormatType::kTrueFalse) {
      const auto truth = parse_truth_token(answer);
      if (!truth) throw Error(ErrorCode::kParse, "true/false answer not recognized: '" + answer + "'");
      out.reference_answer = *truth ? "true" : "false";
    } else {
      if (answer.empty()) throw Error(ErrorCode::kParse, "empty reference answer");
      out.reference_answer = answer;
    }
  }
  out.question_text = text::join(stem, "\n");
  if (out.question_text.empty()) throw Error(ErrorCode::kParse, "empty question text");
  return out;
}

QuestionItem generate_question(const std::vector<KnowledgeInstance>& context, ContentType type, FormatType format,
                               std::string_view language, ChatProvider& chat, const Schema& schema) {
  if (context.empty()) throw Error(ErrorCode::kPrecondition, "generate_question requires a nonempty context");
  std::vector<prompts::ContextLine> lines;
  for (const auto& k : context) {
    const auto* node = schema.find(k.dimension_id);
    lines.push_back({node ? display_name(*node, language) : k.dimension_id, k.statement});
  }
  ChatRequest req;
  req.user_text = prompts::generation_prompt(language, type, format, lines);
  req.language = std::string(language);
  req.max_output_tokens = 1024;
  req.task = LlmTask::kGenerate;

  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) req.user_text += prompts::strict_reminder();
    const ChatResponse resp = chat.chat(req);
    try {
      ParsedQuestion parsed = parse_generated(resp.text, format);
      QuestionItem item;
      item.culture = context.front().culture;
      item.language = std::string(language);
      item.content_type = type;
      item.format = format;
      item.question_text = std::move(parsed.question_text);
      item.options = std::move(parsed.options);
      item.reference_answer = std::move(parsed.reference_answer);
      for (const auto& k : context) item.knowledge_ids.push_back(k.kb_id);
      item.dimension_id = context.front().dimension_id;
      item.item_id = make_item_id(item.culture, item.language, type, item.knowledge_ids, item.question_text);
      return item;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParse) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kGeneration, "generation output unparseable after retry: " + last_error);
}

QuestionQc qc_question(const QuestionItem& item, const KnowledgeBase& kb, ChatProvider& chat) {
  prompts::QcInput in;
  for (const auto& id : item.knowledge_ids) {
    const auto* k = kb.find(id);
    if (!k) throw Error(ErrorCode::kPrecondition, "item " + item.item_id + " references unknown kb_id " + id);
    in.knowledge.push_back(k->statement);
  }
  in.question_text = item.question_text;
  for (const auto& o : item.options) in.options.emplace_back(o.label, o.text);
  in.format = item.format;
  if (item.format == FormatType::kTrueFalse)
    in.reference_answer = item.reference_answer == "true" ? "True" : "False";
  else
    in.reference_answer = item.reference_answer;

  static const std::vector<std::string> kTokens = {"CONSISTENT", "UNANSWERABLE", "WRONG_ANSWER", "CONTRADICTION",
                                                   "LEAKS_CONCEPT"};
  ChatRequest req;
  req.user_text = prompts::qc_prompt(in);
  req.language = item.language;
  req.max_output_tokens = 256;
  req.task = LlmTask::kQualityCheck;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ChatResponse resp = chat.chat(req);
    if (auto token = prompts::parse_verdict_token(resp.text, kTokens)) {
      return QuestionQc{*token == "CONSISTENT" ? QcStatus::kVerified : QcStatus::kRejected, *token,
                        prompts::rationale_after_verdict(resp.text)};
    }
  }
  return QuestionQc{QcStatus::kRejected, "UNANSWERABLE", "verdict could not be parsed after one retry"};
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const DatasetManifest& m) {
  j = nlohmann::json{{"culture", m.culture},
                     {"language", m.language},
                     {"seed", m.seed},
                     {"plan", m.plan},
                     {"kb_version", m.kb_version},
                     {"schema_version", m.schema_version},
                     {"counts_by_type", m.counts_by_type},
                     {"item_count", m.item_count},
                     {"rejected_count", m.rejected_count},
                     {"generation_failures", m.generation_failures},
                     {"dataset_digest", m.dataset_digest}};
}

void from_json(const nlohmann::json& j, DatasetManifest& m) {
  m.culture = j.at("culture").get<std::string>();
  m.language = j.at("language").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.plan = j.value("plan", nlohmann::json::object());
  m.kb_version = j.at("kb_version").get<std::string>();
  m.schema_version = j.value("schema_version", "");
  m.counts_by_type = j.at("counts_by_type").get<std::map<std::string, int>>();
  m.item_count = j.at("item_count").get<int>();
  m.rejected_count = j.value("rejected_count", 0);
  m.generation_failures = j.value("generation_failures", 0);
  m.dataset_digest = j.at("dataset_digest").get<std::string>();
}

std::string dataset_digest(const std::vector<QuestionItem>& items) {
  std::vector<std::string> lines;
  lines.reserve(items.size());
  for (const auto& it : items) lines.push_back(dump_line(nlohmann::json(it)));
  return short_digest(lines);
}

namespace {

struct BucketResult {
  std::vector<QuestionItem> accepted;
  std::vector<QuestionItem> rejected;
  int failures = 0;
};

BucketResult fill_bucket(const KnowledgeBase& kb, const Schema& schema, const GenerationPlan& plan, ContentType type,
                         ChatProvider& chat) {
  BucketResult r;
  const int target = plan.count(type);
  if (target == 0) return r;
  const auto dims = kb.verified_dimensions();
  const auto formats = plan.allowed_formats(type);
  const int budget = plan.budget_for(type);
  const auto k = static_cast<std::size_t>(plan.k_for(type));
  Rng rng(substream_seed(plan.seed, "generate:" + std::string(to_string(type))));
  std::set<std::string> seen;
  std::size_t next_format = 0;
  for (int attempt = 0; attempt < budget && static_cast<int>(r.accepted.size()) < target; ++attempt) {
    const std::string& dim = dims[rng.uniform_index(dims.size())];
    const ContextSample sample = sample_context(kb, schema, dim, k, rng);
    const FormatType format = formats[next_format % formats.size()];
    QuestionItem item;
    try {
      item = generate_question(sample.instances, type, format, plan.language, chat, schema);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGeneration) throw;
      ++r.failures;
      continue;
    }
    if (!seen.insert(item.item_id).second) {
      item.qc_status = QcStatus::kRejected;
      item.qc_reason = "DUPLICATE";
      r.rejected.push_back(std::move(item));
      continue;
    }
    const QuestionQc qc = qc_question(item, kb, chat);
    item.qc_status = qc.status;
    item.qc_reason = qc.reason;
    item.qc_rationale = qc.rationale;
    if (qc.status == QcStatus::kVerified) {
      check_item(item);
      r.accepted.push_back(std::move(item));
      ++next_format;
    } else {
      r.rejected.push_back(std::move(item));
    }
  }
  return r;
}

}  // namespace

Dataset build_dataset(const KnowledgeBase& kb, const Schema& schema, const GenerationPlan& plan, ChatProvider& chat) {
  plan.validate();
  const auto dims = kb.verified_dimensions();
  if (dims.empty() && plan.total_items > 0)
    throw Error(ErrorCode::kPrecondition, "plan requests items but the knowledge base has no VERIFIED instances");

  const std::vector<ContentType> types(kAllContentTypes.begin(), kAllContentTypes.end());
  const auto buckets = parallel_map(types, static_cast<std::size_t>(plan.workers), [&](ContentType type) {
    return fill_bucket(kb, schema, plan, type, chat);
  });

  Dataset ds;
  std::vector<std::string> shortfalls;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& b = buckets[i];
    const int target = plan.count(types[i]);
    ds.manifest.counts_by_type[std::string(to_string(types[i]))] = static_cast<int>(b.accepted.size());
    ds.manifest.generation_failures += b.failures;
    if (static_cast<int>(b.accepted.size()) < target)
      shortfalls.push_back(std::string(to_string(types[i])) + " " + std::to_string(b.accepted.size()) + "/" +
                           std::to_string(target));
    ds.items.insert(ds.items.end(), b.accepted.begin(), b.accepted.end());
    ds.rejected.insert(ds.rejected.end(), b.rejected.begin(), b.rejected.end());
  }
  if (!shortfalls.empty())
    throw Error(ErrorCode::kPartialDataset, "retry budget exhausted; shortfall: " + text::join(shortfalls, ", "));

  auto by_id = [](const QuestionItem& a, const QuestionItem& b) { return a.item_id < b.item_id; };
  std::stable_sort(ds.items.begin(), ds.items.end(), by_id);
  std::stable_sort(ds.rejected.begin(), ds.rejected.end(), by_id);
  ds.manifest.culture = plan.culture;
  ds.manifest.language = plan.language;
  ds.manifest.seed = plan.seed;
  ds.manifest.plan = plan_to_json(plan);
  ds.manifest.kb_version = kb.version();
  ds.manifest.schema_version = schema.version();
  ds.manifest.item_count = static_cast<int>(ds.items.size());
  ds.manifest.rejected_count = static_cast<int>(ds.rejected.size());
  ds.manifest.dataset_digest = dataset_digest(ds.items);
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_records(dir / "items.jsonl", dataset.items);
  write_records(dir / "rejected.jsonl", dataset.rejected);
  write_json_file(dir / "manifest.json", nlohmann::json(dataset.manifest));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto manifest_path = std::filesystem::is_directory(path) ? path / "manifest.json" : path;
  const auto dir = manifest_path.parent_path();
  Dataset ds;
  ds.manifest = read_json_file(manifest_path).get<DatasetManifest>();
  ds.items = read_records<QuestionItem>(dir / "items.jsonl");
  if (std::filesystem::exists(dir / "rejected.jsonl")) ds.rejected = read_records<QuestionItem>(dir / "rejected.jsonl");
  if (dataset_digest(ds.items) != ds.manifest.dataset_digest)
    throw Error(ErrorCode::kIntegrity, "dataset items in " + dir.string() + " do not match the manifest digest");
  return ds;
}

}  // namespace culturescope
