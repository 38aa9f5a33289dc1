#include "culturescope/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "culturescope/digest.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

void to_json(nlohmann::json& j, const KnowledgeInstance& k) {
  j = nlohmann::json{{"kb_id", k.kb_id},
                     {"culture", k.culture},
                     {"language", k.language},
                     {"dimension_id", k.dimension_id},
                     {"statement", k.statement},
                     {"source_url", k.source_url},
                     {"source_quote", k.source_quote},
                     {"source_category", to_string(k.source_category)},
                     {"qc_status", to_string(k.qc_status)},
                     {"qc_reason", k.qc_reason},
                     {"qc_rationale", k.qc_rationale}};
  j["cluster_label"] = k.cluster_label ? nlohmann::json(*k.cluster_label) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, KnowledgeInstance& k) {
  k.kb_id = j.at("kb_id").get<std::string>();
  k.culture = j.at("culture").get<std::string>();
  k.language = j.at("language").get<std::string>();
  k.dimension_id = j.at("dimension_id").get<std::string>();
  k.statement = j.at("statement").get<std::string>();
  k.source_url = j.at("source_url").get<std::string>();
  k.source_quote = j.value("source_quote", "");
  const auto cat = parse_source_category(j.value("source_category", "OTHER"));
  const auto qc = parse_qc_status(j.value("qc_status", "PENDING"));
  if (!cat || !qc) throw Error(ErrorCode::kParse, "bad enum value in knowledge instance " + k.kb_id);
  k.source_category = *cat;
  k.qc_status = *qc;
  k.qc_reason = j.value("qc_reason", "");
  k.qc_rationale = j.value("qc_rationale", "");
  if (j.contains("cluster_label") && !j["cluster_label"].is_null())
    k.cluster_label = j["cluster_label"].get<std::string>();
  else
    k.cluster_label.reset();
}

void check_instance(const KnowledgeInstance& k) {
  if (text::trim(k.statement).empty())
    throw Error(ErrorCode::kIntegrity, "knowledge instance " + k.kb_id + " has an empty statement");
  if (k.qc_status == QcStatus::kVerified && k.qc_reason.empty())
    throw Error(ErrorCode::kIntegrity, "knowledge instance " + k.kb_id + " is VERIFIED without a recorded verdict");
  if (k.dimension_id.empty() || k.source_url.empty())
    throw Error(ErrorCode::kIntegrity, "knowledge instance " + k.kb_id + " lacks provenance");
}

std::string make_kb_id(std::string_view culture, std::string_view language, std::string_view dimension_id,
                       std::string_view statement) {
  return short_digest({culture, language, dimension_id, text::normalize_for_match(statement)});
}

namespace {

enum class Field { kTitle, kDescription, kSource };

struct FieldPrefix {
  std::string_view prefix;
  Field field;
};

// Longest prefixes first so "Description of the feature" wins over "Description".
constexpr std::array<FieldPrefix, 20> kPrefixes = {{
    {"description of the feature", Field::kDescription},
    {"descripción de la característica", Field::kDescription},
    {"descripcion de la caracteristica", Field::kDescription},
    {"fuente de información", Field::kSource},
    {"fuente de informacion", Field::kSource},
    {"source of information", Field::kSource},
    {"特征描述", Field::kDescription},
    {"信息来源", Field::kSource},
    {"description", Field::kDescription},
    {"descripción", Field::kDescription},
    {"descripcion", Field::kDescription},
    {"título", Field::kTitle},
    {"titulo", Field::kTitle},
    {"source", Field::kSource},
    {"fuente", Field::kSource},
    {"title", Field::kTitle},
    {"标题", Field::kTitle},
    {"描述", Field::kDescription},
    {"来源", Field::kSource},
    {"quote", Field::kSource},
}};

std::string strip_decor(std::string_view line) {
  std::string s = text::trim(line);
  for (std::string_view marker : {"**", "__"}) {
    std::size_t pos;
    while ((pos = s.find(marker)) != std::string::npos) s.erase(pos, marker.size());
  }
  s = text::trim(s);
  while (!s.empty() && s.front() == '#') s.erase(0, 1);
  s = text::trim(s);
  if (s.starts_with("- ") || s.starts_with("* ")) s = text::trim(std::string_view(s).substr(2));
  if (s.starts_with("• ")) s = text::trim(std::string_view(s).substr(std::string_view("• ").size()));
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')') &&
      (digits + 1 == s.size() || s[digits + 1] == ' '))
    s = text::trim(std::string_view(s).substr(digits + 1));
  return s;
}

std::optional<std::pair<Field, std::string>> match_field(const std::string& s) {
  for (const auto& p : kPrefixes) {
    if (!text::starts_with_ci(s, p.prefix)) continue;
    std::string_view rest = std::string_view(s).substr(p.prefix.size());
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (rest.starts_with(":")) {
      rest.remove_prefix(1);
    } else if (rest.starts_with("：")) {
      rest.remove_prefix(std::string_view("：").size());
    } else {
      continue;
    }
    return std::pair(p.field, text::trim(rest));
  }
  return std::nullopt;
}

std::string& field_ref(Section& s, Field f) {
  switch (f) {
    case Field::kTitle: return s.title;
    case Field::kDescription: return s.description;
    case Field::kSource: return s.source_quote;
  }
  return s.title;
}

bool is_heading(std::string_view raw) {
  const std::string t = text::trim(raw);
  if (t.starts_with("#")) return true;
  return t.size() > 4 && t.starts_with("**") && t.ends_with("**");
}

}  // namespace

std::vector<Section> parse_sections(std::string_view model_text) {
  std::vector<Section> out;
  Section cur;
  std::optional<Field> pending;
  auto flush = [&] {
    if (!cur.description.empty() || !cur.source_quote.empty()) out.push_back(cur);
    cur = Section{};
    pending.reset();
  };
  for (const auto& raw : text::split_lines(model_text)) {
    const std::string t = text::trim(raw);
    if (t.empty() || t == prompts::kDocFence || t == "---" || t == "```") continue;
    const std::string s = strip_decor(t);
    if (s.empty()) continue;
    if (auto f = match_field(s)) {
      std::string& slot = field_ref(cur, f->first);
      if (!slot.empty()) {
        flush();
      }
      field_ref(cur, f->first) = f->second;
      if (f->second.empty())
        pending = f->first;
      else
        pending.reset();
      continue;
    }
    if (is_heading(t)) {
      if (!cur.title.empty() || !cur.description.empty() || !cur.source_quote.empty()) flush();
      cur.title = s;
      continue;
    }
    if (pending) {
      std::string& slot = field_ref(cur, *pending);
      slot = slot.empty() ? s : slot + " " + s;
      pending.reset();
      continue;
    }
    if (!cur.source_quote.empty()) {
      flush();
      cur.title = s;
    } else if (!cur.description.empty()) {
      cur.description += " " + s;
    } else if (!cur.title.empty()) {
      cur.description = s;
    } else {
      cur.title = s;
    }
  }
  flush();
  return out;
}

std::string render_sections(const std::vector<Section>& sections, std::string_view language) {
  std::string out;
  for (const auto& s : sections) {
    const std::string title = text::collapse_whitespace(s.title);
    const std::string desc = text::collapse_whitespace(s.description);
    const std::string src = text::collapse_whitespace(s.source_quote);
    if (language == "es") {
      if (!title.empty() && !desc.empty())
        out += title + "\n\n" + desc + "\n\n";
      else
        out += "Título: " + title + "\nDescripción: " + desc + "\n";
      out += "Fuente de información: " + src + "\n\n";
    } else if (language == "zh") {
      out += "标题：" + title + "\n特征描述：" + desc + "\n信息来源：" + src + "\n\n";
    } else {
      out += "Title: " + title + "\nDescription of the feature: " + desc + "\nSource of information: " + src + "\n\n";
    }
  }
  return out;
}

std::string clean_quote(std::string_view quote) {
  std::string q = text::collapse_whitespace(quote);
  // Trailing paragraph marker: "(paragraph 2)", "(párrafo 2)", "（第2段）".
  for (std::string_view open : {"(paragraph", "(para", "(párrafo", "(parrafo", "（第", "(第"}) {
    const auto pos = text::to_lower(q).rfind(open);
    if (pos != std::string::npos && pos > 0 && (q.ends_with(")") || q.ends_with("）"))) {
      q = text::trim(std::string_view(q).substr(0, pos));
      break;
    }
  }
  static const std::vector<std::pair<std::string_view, std::string_view>> kQuotes = {
      {"\"", "\""}, {"“", "”"}, {"«", "»"}, {"「", "」"}, {"'", "'"}, {"‘", "’"}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [o, c] : kQuotes) {
      if (q.size() >= o.size() + c.size() && q.starts_with(o) && q.ends_with(c)) {
        q = text::trim(std::string_view(q).substr(o.size(), q.size() - o.size() - c.size()));
        changed = true;
      }
    }
  }
  return q;
}

ExtractionResult extract_knowledge(const RawDocument& doc, const DimensionNode& dimension, ChatProvider& chat) {
  if (text::trim(doc.body_text).empty())
    throw Error(ErrorCode::kPrecondition, "extract_knowledge: document " + doc.doc_id + " has an empty body");
  if (dimension.node_id != doc.dimension_id)
    throw Error(ErrorCode::kPrecondition, "extract_knowledge: document " + doc.doc_id + " belongs to " +
                                              doc.dimension_id + ", not " + dimension.node_id);
  if (!dimension.is_leaf()) throw Error(ErrorCode::kLevel, "extract_knowledge requires a leaf dimension");

  ChatRequest req;
  req.user_text = prompts::summary_prompt(doc.language, doc.culture, display_name(dimension, doc.language),
                                          doc.body_text);
  req.language = doc.language;
  req.max_output_tokens = 2048;
  req.task = LlmTask::kSummarize;
  const ChatResponse resp = chat.chat(req);

  ExtractionResult result;
  const auto sections = parse_sections(resp.text);
  if (sections.empty()) {
    result.warnings.push_back("no parseable sections in summary for document " + doc.doc_id);
    return result;
  }
  std::set<std::string> seen;
  std::size_t dropped = 0;
  for (const auto& s : sections) {
    const std::string quote = clean_quote(s.source_quote);
    const std::string statement = text::collapse_whitespace(s.description);
    if (quote.empty() || statement.empty()) {
      ++dropped;
      continue;
    }
    KnowledgeInstance k;
    k.culture = doc.culture;
    k.language = doc.language;
    k.dimension_id = doc.dimension_id;
    k.statement = statement;
    k.source_url = doc.url;
    k.source_quote = quote;
    k.source_category = doc.source_category;
    k.kb_id = make_kb_id(k.culture, k.language, k.dimension_id, k.statement);
    if (seen.insert(k.kb_id).second) result.instances.push_back(std::move(k));
  }
  if (dropped > 0)
    result.warnings.push_back(std::to_string(dropped) + " section(s) without description or source dropped for " +
                              doc.doc_id);
  return result;
}

bool quote_occurs_in(std::string_view quote, std::string_view body) {
  std::string q = text::normalize_for_match(clean_quote(quote));
  while (!q.empty() && (q.back() == '.' || q.back() == ',' || q.back() == ';' || q.back() == ':')) q.pop_back();
  if (q.empty()) return false;
  return text::normalize_for_match(body).find(q) != std::string::npos;
}

QcVerdict verify_instance(const KnowledgeInstance& instance, const RawDocument& doc, std::string_view dimension_name,
                          ChatProvider& chat) {
  if (instance.source_url != doc.url)
    throw Error(ErrorCode::kPrecondition,
                "verify_instance: instance " + instance.kb_id + " was not extracted from " + doc.url);
  if (!quote_occurs_in(instance.source_quote, doc.body_text))
    return QcVerdict{QcStatus::kRejected, "QUOTE_MISSING", "quoted evidence not found in the source text", false};

  static const std::vector<std::string> kTokens = {"ENTAILED", "NOT_ENTAILED", "WRONG_DIMENSION"};
  ChatRequest req;
  req.user_text = prompts::verify_prompt(dimension_name, instance.statement, instance.source_quote, doc.body_text);
  req.language = doc.language;
  req.max_output_tokens = 128;
  req.task = LlmTask::kVerify;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ChatResponse resp = chat.chat(req);
    if (auto token = prompts::parse_verdict_token(resp.text, kTokens)) {
      QcVerdict v;
      v.status = *token == "ENTAILED" ? QcStatus::kVerified : QcStatus::kRejected;
      v.reason = *token;
      v.rationale = prompts::rationale_after_verdict(resp.text);
      v.llm_called = true;
      return v;
    }
  }
  return QcVerdict{QcStatus::kRejected, "NOT_ENTAILED", "verdict could not be parsed after one retry", true};
}

void apply_verdict(KnowledgeInstance& instance, const QcVerdict& verdict) {
  instance.qc_status = verdict.status;
  instance.qc_reason = verdict.reason;
  instance.qc_rationale = verdict.rationale;
}

void normalize_kb(std::vector<KnowledgeInstance>& kb) {
  std::stable_sort(kb.begin(), kb.end(), [](const auto& a, const auto& b) { return a.kb_id < b.kb_id; });
  kb.erase(std::unique(kb.begin(), kb.end(), [](const auto& a, const auto& b) { return a.kb_id == b.kb_id; }),
           kb.end());
}

}  // namespace culturescope
