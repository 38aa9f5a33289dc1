#include "culturescope/mock_llm.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "culturescope/curation.hpp"
#include "culturescope/digest.hpp"
#include "culturescope/extraction.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

namespace {

std::size_t hash_pick(std::string_view seed, std::size_t n) {
  const std::string d = short_digest({seed});
  return static_cast<std::size_t>(std::stoull(d.substr(0, 12), nullptr, 16) % n);
}

std::vector<std::string> culture_aliases(std::string_view culture) {
  const std::string c = text::to_lower(text::trim(culture));
  if (c == "spanish" || c == "spain")
    return {"spanish", "spain", "españa", "español", "española", "espanol", "espana"};
  if (c == "chinese" || c == "china") return {"chinese", "china", "中国", "中华", "华人"};
  return {c};
}

std::string strip_end_punct(std::string s) {
  while (!s.empty() && std::string_view(".!?;:").find(s.back()) != std::string_view::npos) s.pop_back();
  return text::trim(s);
}

bool negation_parity(std::string_view a, std::string_view b) {
  return text::negation_count(a) % 2 == text::negation_count(b) % 2;
}

bool overgeneralizes(std::string_view s) {
  const std::string l = text::to_lower(s);
  for (std::string_view cue : {"everyone", "without exception", "always", "all people", "identical", "never change",
                               "todos", "siempre", "sin excepción", "所有人", "总是"})
    if (l.find(cue) != std::string::npos) return true;
  return false;
}

// Best (coverage, index) of `claim` against each statement, plus whether the
// best statement agrees on negation.
struct Support {
  double coverage = 0.0;
  bool parity = true;
};

Support support_for(std::string_view claim, const std::vector<std::string>& statements) {
  Support best;
  bool first = true;
  for (const auto& s : statements) {
    const double c = text::term_coverage(claim, s);
    if (first || c > best.coverage) {
      best.coverage = c;
      best.parity = negation_parity(claim, s);
      first = false;
    }
  }
  return best;
}

std::vector<std::string> bullet_lines(std::string_view block, std::string_view marker = "- ") {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(block)) {
    const std::string t = text::trim(line);
    if (t.starts_with(marker)) out.push_back(text::trim(std::string_view(t).substr(marker.size())));
  }
  return out;
}

struct OptionLine {
  std::string label;
  std::string text;
};

std::optional<OptionLine> option_line(std::string_view line) {
  const std::string t = text::trim(line);
  if (t.size() < 4 || t[0] < 'A' || t[0] > 'H' || t[1] != ')' || t[2] != ' ') return std::nullopt;
  return OptionLine{std::string(1, t[0]), text::trim(std::string_view(t).substr(3))};
}

// ---------------------------------------------------------------------------

std::string do_filter(const std::string& prompt) {
  const std::string culture = prompts::line_value(prompt, "Target culture:");
  const std::string dimension = prompts::line_value(prompt, "Cultural dimension:");
  const std::string body = prompts::between_fences(prompt, prompts::kDocFence);
  const auto body_terms_vec = text::content_terms(body);
  const std::set<std::string> body_terms(body_terms_vec.begin(), body_terms_vec.end());
  if (body_terms.size() < 12) return "BOILERPLATE\nThe page has too little running text.";
  bool on_topic = false;
  for (const auto& t : text::content_terms(dimension)) on_topic = on_topic || body_terms.count(t) > 0;
  if (!on_topic) return "OFF_TOPIC\nThe page does not discuss " + dimension + ".";
  bool culture_hit = false;
  for (const auto& alias : culture_aliases(culture)) culture_hit = culture_hit || text::contains_ci(body, alias);
  if (!culture_hit) return "WRONG_CULTURE\nThe page is not about " + culture + " culture.";
  return "ACCEPT\nThe page discusses " + dimension + " in " + culture + " culture.";
}

std::string do_summarize(const ChatRequest& req) {
  const std::string body = prompts::between_fences(req.user_text, prompts::kDocFence);
  std::vector<Section> sections;
  int paragraph = 0;
  for (const auto& line : text::split_lines(body)) {
    if (text::trim(line).empty()) continue;
    ++paragraph;
    for (const auto& sentence : text::split_sentences(line)) {
      const char last = sentence.empty() ? ' ' : sentence.back();
      const bool terminal = last == '.' || last == '!' || last == '?' || sentence.ends_with("。");
      const auto tokens = text::tokenize(sentence);
      if (!terminal || tokens.size() < 5 || tokens.size() > 60) continue;
      Section s;
      std::vector<std::string> words = text::split(strip_end_punct(sentence), ' ');
      if (words.size() > 4) words.resize(4);
      s.title = text::join(words, " ");
      s.description = sentence;
      s.source_quote = "\"" + sentence + "\" (paragraph " + std::to_string(paragraph) + ")";
      sections.push_back(std::move(s));
      if (sections.size() >= 8) break;
    }
    if (sections.size() >= 8) break;
  }
  if (sections.empty()) return "The article does not contain enough information about this dimension.";
  return render_sections(sections, req.language);
}

std::string do_verify(const std::string& prompt) {
  const std::string statement = prompts::line_value(prompt, "Statement:");
  const std::string quote = prompts::line_value(prompt, "Quoted evidence:");
  const std::string body = prompts::between_fences(prompt, prompts::kDocFence);
  if (text::term_coverage(statement, body) < 0.7) return "NOT_ENTAILED\nThe page does not support the statement.";
  if (!negation_parity(statement, quote)) return "NOT_ENTAILED\nThe statement contradicts the quoted evidence.";
  return "ENTAILED\nThe quoted evidence supports the statement.";
}

std::string do_cluster_label(const std::string& prompt) {
  return tf_label(bullet_lines(prompts::section_after(prompt, "Statements:", {})));
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kDistractors = {
    "It is reserved exclusively for royalty and has no role in everyday life",
    "It was banned nationwide in the nineteenth century and never revived",
    "It is practiced only by recent immigrants in a few coastal cities",
    "It is considered impolite and is generally avoided in public",
    "It takes place only once every fifty years",
    "It is a recent invention introduced by international advertising campaigns",
    "It is legally required for every adult and enforced with heavy fines",
};

const std::vector<std::string> kStereotypes = {
    "Everyone in this culture always follows this custom in exactly the same way",
    "People from this culture never change their traditions, regardless of region or generation",
    "This custom proves that all people in the culture share identical values",
};

const std::vector<std::string> kAccurateFillers = {
    "Practices differ between regions and generations",
    "Individual families adapt the custom to their own circumstances",
    "Urban and rural communities may observe it differently",
};

std::string negate(const std::string& statement) {
  auto words = text::split(statement, ' ');
  static const std::set<std::string> kAux = {"is", "are", "was", "were", "can", "has", "have", "will", "should",
                                             "must", "may"};
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (kAux.count(text::to_lower(words[i]))) {
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, "not");
      return text::join(words, " ");
    }
  }
  std::string lowered = statement;
  if (!lowered.empty() && std::isupper(static_cast<unsigned char>(lowered[0])) && !statement.starts_with("Las ") &&
      !statement.starts_with("La ") && !statement.starts_with("El "))
    lowered[0] = static_cast<char>(std::tolower(lowered[0]));
  return "It is not true that " + lowered;
}

std::string blank_out(const std::string& statement, std::string& answer) {
  auto words = text::split(statement, ' ');
  std::size_t best = words.size();
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = strip_end_punct(words[i]);
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.pop_back();
    const bool alpha = !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isalpha(c); });
    if (alpha && w.size() > best_len && !text::is_stopword(text::to_lower(w))) {
      best = i;
      best_len = w.size();
      answer = w;
    }
  }
  if (best == words.size()) {
    answer = strip_end_punct(statement);
    return "____";
  }
  const std::string tail = words[best].substr(answer.size());
  words[best] = "____" + tail;
  return text::join(words, " ");
}

std::string do_generate(const ChatRequest& req) {
  const std::string& prompt = req.user_text;
  std::string format = prompts::line_value(prompt, "Format:");
  format = format.substr(0, format.find('.'));
  std::string type = "FACTUAL";
  if (prompt.find("conceptual explanation question") != std::string::npos) type = "CONCEPTUAL";
  if (prompt.find("generate a misleading question") != std::string::npos) type = "MISLEADING";
  if (prompt.find("multi-hop reasoning question") != std::string::npos) type = "MULTI_HOP";

  std::vector<std::string> statements, dims;
  for (const auto& line : bullet_lines(prompts::between_fences(prompt, "'''"))) {
    const auto close = line.find("] ");
    if (line.starts_with("[") && close != std::string::npos) {
      dims.push_back(line.substr(1, close - 1));
      statements.push_back(strip_end_punct(line.substr(close + 2)));
    } else {
      dims.emplace_back("culture");
      statements.push_back(strip_end_punct(line));
    }
  }
  if (statements.empty()) return "I need some context to write a question.";
  const std::string seed = text::join(statements, "|") + "#" + type + "#" + format;
  const std::string& topic = dims.front();

  if (format == "MULTIPLE_CHOICE") {
    std::vector<std::string> options;
    std::string stem;
    std::size_t correct = hash_pick(seed + "#pos", 4);
    if (type == "MISLEADING") {
      stem = "Which of the following statements about " + topic +
             " reflects a common stereotype rather than an accurate understanding?";
      std::vector<std::string> accurate;
      for (std::size_t i = 0; i < statements.size() && accurate.size() < 3; ++i) accurate.push_back(statements[i]);
      for (std::size_t i = 0; accurate.size() < 3; ++i) accurate.push_back(kAccurateFillers[i]);
      options = accurate;
      options.insert(options.begin() + static_cast<std::ptrdiff_t>(correct),
                     kStereotypes[hash_pick(seed + "#st", kStereotypes.size())]);
    } else {
      if (type == "CONCEPTUAL")
        stem = "Which of the following best reflects how " + topic + " is understood in this cultural setting?";
      else if (type == "MULTI_HOP")
        stem = "Considering several related customs together, which statement about " + topic + " is accurate?";
      else
        stem = "Which of the following statements about " + topic + " is accurate?";
      const std::size_t start = hash_pick(seed + "#d", kDistractors.size());
      for (std::size_t i = 0; options.size() < 3; ++i) options.push_back(kDistractors[(start + i) % kDistractors.size()]);
      options.insert(options.begin() + static_cast<std::ptrdiff_t>(correct), statements.front());
    }
    std::string out = "Question:\n" + stem + "\n";
    for (std::size_t i = 0; i < options.size(); ++i) out += std::string(1, static_cast<char>('A' + i)) + ") " + options[i] + "\n";
    out += "\nReference Answer: " + std::string(1, static_cast<char>('A' + correct)) + "\n";
    return out;
  }
  if (format == "TRUE_FALSE") {
    if (type == "MISLEADING") {
      return "Question:\nTrue or false: Regarding " + topic +
             ", everyone in this culture always does the following without exception: " + statements.front() +
             ".\n\nReference Answer: False\n";
    }
    const bool truth = hash_pick(seed + "#tf", 2) == 0;
    const std::string claim = truth ? statements.front() : negate(statements.front());
    return "Question:\nTrue or false: " + claim + ".\n\nReference Answer: " + (truth ? "True" : "False") + "\n";
  }
  if (format == "SHORT_ANSWER") {
    if (type == "FACTUAL") {
      std::string answer;
      const std::string stem = blank_out(statements.front(), answer);
      return "Question:\nFill in the blank: " + stem + ".\n\nReference Answer: " + answer + "\n";
    }
    std::vector<std::string> picked(statements.begin(), statements.begin() + std::min<std::size_t>(2, statements.size()));
    return "Question:\nBriefly explain what connects the customs related to " + topic +
           " and their wider social context.\n\nReference Answer: " + text::join(picked, ". ") + ".\n";
  }
  std::set<std::string> unique_dims(dims.begin(), dims.end());
  return "Question:\nDiscuss how the practices concerning " +
         text::join(std::vector<std::string>(unique_dims.begin(), unique_dims.end()), ", ") +
         " relate to one another and what they reveal about everyday life.\n\nReference Answer: " +
         text::join(statements, ". ") + ".\n";
}

// ---------------------------------------------------------------------------

std::string do_quality_check(const std::string& prompt) {
  const auto knowledge = bullet_lines(prompts::section_after(prompt, "Reference knowledge:", {"Question:"}));
  if (knowledge.empty()) return "UNANSWERABLE\nNo reference knowledge was supplied.";
  const std::string joined = text::join(knowledge, " ");
  const std::string question = prompts::section_after(prompt, "Question:", {"Options:", "Format:"});
  std::vector<OptionLine> options;
  for (const auto& line : text::split_lines(prompts::section_after(prompt, "Options:", {"Format:"})))
    if (auto o = option_line(line)) options.push_back(*o);
  const std::string format = prompts::line_value(prompt, "Format:");
  const std::string answer = prompts::line_value(prompt, "Reference Answer:");

  if (format == "MULTIPLE_CHOICE") {
    auto chosen = std::find_if(options.begin(), options.end(), [&](const auto& o) { return o.label == answer; });
    if (chosen == options.end()) return "WRONG_ANSWER\nThe reference answer is not one of the options.";
    if (text::contains_ci(question, "stereotype")) {
      const bool ok = overgeneralizes(chosen->text) && support_for(chosen->text, knowledge).coverage < 0.5;
      return ok ? "CONSISTENT\nThe keyed option is the overgeneralization."
                : "WRONG_ANSWER\nThe keyed option is not the stereotyped statement.";
    }
    std::string best;
    double best_score = -1.0;
    bool tie = false;
    for (const auto& o : options) {
      const Support s = support_for(o.text, knowledge);
      const double score = s.parity ? s.coverage : 0.0;
      if (score > best_score + 1e-12) {
        best_score = score;
        best = o.label;
        tie = false;
      } else if (std::abs(score - best_score) <= 1e-12) {
        tie = true;
      }
    }
    if (tie || best_score < 0.7) return "UNANSWERABLE\nNo single option is supported by the knowledge.";
    if (best != answer) return "WRONG_ANSWER\nThe knowledge supports option " + best + ".";
    return "CONSISTENT\nThe keyed option is supported by the knowledge.";
  }
  if (format == "TRUE_FALSE") {
    std::string claim = question;
    if (text::starts_with_ci(claim, "true or false:")) claim = text::trim(std::string_view(claim).substr(14));
    bool expected;
    if (overgeneralizes(claim)) {
      expected = false;
    } else {
      const Support s = support_for(claim, knowledge);
      expected = s.coverage >= 0.7 && s.parity;
    }
    const bool keyed = text::starts_with_ci(answer, "true");
    if (keyed != expected) return "WRONG_ANSWER\nThe knowledge implies the statement is " +
                                  std::string(expected ? "true" : "false") + ".";
    return "CONSISTENT\nThe truth value follows from the knowledge.";
  }
  if (text::term_coverage(answer, joined) < 0.5) return "UNANSWERABLE\nThe answer is not grounded in the knowledge.";
  for (const auto& sentence : text::split_sentences(answer)) {
    const Support s = support_for(sentence, knowledge);
    if (s.coverage >= 0.5 && !s.parity) return "CONTRADICTION\nThe answer negates the reference knowledge.";
  }
  return "CONSISTENT\nThe answer is grounded in the knowledge.";
}

std::string do_answer(const ChatRequest& req) {
  const std::string& prompt = req.user_text;
  const bool has_refs = prompt.starts_with("Reference:");
  std::vector<std::string> refs;
  std::string question_block = prompt;
  if (has_refs) {
    for (const auto& line : text::split_lines(prompts::section_after(prompt, "Reference:", {"Question:"}))) {
      const std::string t = text::trim(line);
      const auto dot = t.find(". ");
      if (dot != std::string::npos && dot > 0) refs.push_back(t.substr(dot + 2));
    }
    question_block = prompts::section_after(prompt, "Question:", {});
  }
  std::vector<OptionLine> options;
  std::vector<std::string> stem_lines;
  std::string instruction;
  for (const auto& line : text::split_lines(question_block)) {
    if (auto o = option_line(line)) {
      options.push_back(*o);
    } else if (!text::trim(line).empty()) {
      stem_lines.push_back(text::trim(line));
    }
  }
  if (!stem_lines.empty()) {
    instruction = stem_lines.back();
    stem_lines.pop_back();
  }
  const std::string stem = text::join(stem_lines, " ");
  const bool tf = instruction == prompts::answer_instruction(FormatType::kTrueFalse, req.language);

  if (!options.empty()) {
    std::string pick;
    if (!refs.empty()) {
      const bool stereotype = text::contains_ci(stem, "stereotype");
      double best = -1.0;
      for (const auto& o : options) {
        const Support s = support_for(o.text, refs);
        double score = s.parity ? s.coverage : 0.0;
        if (stereotype) score = overgeneralizes(o.text) ? 1.0 - s.coverage : -s.coverage;
        if (score > best + 1e-12) {
          best = score;
          pick = o.label;
        }
      }
    } else {
      pick = options[hash_pick(prompt, options.size())].label;
    }
    return "The answer is (" + pick + ").";
  }
  if (tf) {
    std::string claim = stem;
    if (text::starts_with_ci(claim, "true or false:")) claim = text::trim(std::string_view(claim).substr(14));
    bool verdict;
    if (!refs.empty()) {
      const Support s = support_for(claim, refs);
      verdict = !overgeneralizes(claim) && s.coverage >= 0.7 && s.parity;
    } else {
      verdict = hash_pick(prompt, 2) == 0;
    }
    return verdict ? "True." : "False.";
  }
  if (!refs.empty()) return text::join(refs, " ");
  return "It depends on regional customs and personal preferences.";
}

std::string do_judge(const std::string& prompt) {
  const std::string reference = prompts::section_after(prompt, "Reference Answer:", {"Test Answer:"});
  const std::string test = prompts::section_after(prompt, "Test Answer:", {});
  if (!negation_parity(reference, test) && text::term_coverage(reference, test) >= 0.5)
    return "INCORRECT\nConflict: yes\nThe test answer contradicts the reference.";
  if (text::term_coverage(reference, test) >= 0.5)
    return "CORRECT\nConflict: no\nThe test answer covers the key content of the reference.";
  return "INCORRECT\nConflict: no\nThe test answer misses the key content of the reference.";
}

}  // namespace

MockChatProvider::MockChatProvider(std::string id, CallLog* log) : id_(std::move(id)), log_(log) {}

std::string MockChatProvider::reply(const ChatRequest& request) {
  switch (request.task) {
    case LlmTask::kFilter: return do_filter(request.user_text);
    case LlmTask::kSummarize: return do_summarize(request);
    case LlmTask::kVerify: return do_verify(request.user_text);
    case LlmTask::kClusterLabel: return do_cluster_label(request.user_text);
    case LlmTask::kGenerate: return do_generate(request);
    case LlmTask::kQualityCheck: return do_quality_check(request.user_text);
    case LlmTask::kAnswer: return do_answer(request);
    case LlmTask::kJudge: return do_judge(request.user_text);
    case LlmTask::kGeneric: break;
  }
  return "OK";
}

ChatResponse MockChatProvider::chat(const ChatRequest& request) {
  request.validate();
  ChatResponse resp;
  resp.text = reply(request);
  resp.provider_id = id_;
  resp.token_counts.input = static_cast<std::int64_t>(text::tokenize(request.user_text).size());
  resp.token_counts.output = static_cast<std::int64_t>(text::tokenize(resp.text).size());
  if (log_)
    log_->record({id_, "chat:" + std::string(to_string(request.task)), request_digest(request), 0.0, "ok"});
  return resp;
}

}  // namespace culturescope
