#include "culturescope/prompts.hpp"

#include <algorithm>
#include <cctype>

#include "culturescope/text.hpp"

namespace culturescope::prompts {

namespace {

std::string fenced(std::string_view body) {
  std::string out(kDocFence);
  out += "\n";
  out += body;
  out += "\n";
  out += kDocFence;
  out += "\n";
  return out;
}

std::string spanish_culture_adjective(std::string_view culture) {
  const std::string c = text::to_lower(culture);
  if (c == "spanish" || c == "spain" || c == "española") return "española";
  if (c == "chinese" || c == "china") return "china";
  return std::string(culture);
}

std::string clean_verdict_line(std::string_view line) {
  std::string s = text::trim(line);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '*' || c == '`' || c == '#'; }), s.end());
  s = text::trim(s);
  if (text::starts_with_ci(s, "verdict:")) s = text::trim(std::string_view(s).substr(8));
  if (text::starts_with_ci(s, "veredicto:")) s = text::trim(std::string_view(s).substr(10));
  return s;
}

}  // namespace

std::string filter_prompt(std::string_view culture, std::string_view dimension, std::string_view title,
                          std::string_view body) {
  std::string p;
  p += "You are screening web pages for a cultural knowledge base.\n";
  p += "Target culture: " + std::string(culture) + "\n";
  p += "Cultural dimension: " + std::string(dimension) + "\n\n";
  p += "Decide whether the page below contains substantive information about this dimension in the target culture.\n";
  p += "Answer on the first line with exactly one verdict token:\n";
  p += "ACCEPT - relevant to the dimension and the culture\n";
  p += "OFF_TOPIC - not about this dimension\n";
  p += "BOILERPLATE - navigation, advertising or other non-content text\n";
  p += "WRONG_CULTURE - about a different culture\n";
  p += "Then give a one-sentence rationale on the next line.\n\n";
  p += "Page title: " + std::string(title) + "\n";
  p += "Page text:\n";
  p += fenced(body);
  return p;
}

std::string summary_prompt(std::string_view language, std::string_view culture, std::string_view dimension,
                           std::string_view body) {
  std::string p;
  if (language == "es") {
    const std::string adj = spanish_culture_adjective(culture);
    p += "Eres un investigador especializado en la cultura " + adj +
         ". Se te proporcionará un texto de una página web (puede estar en cualquier idioma).\n\n";
    p += "Tu tarea es identificar las características culturales que estén relacionadas con el siguiente aspecto "
         "específico de la cultura " + adj + ":\n\n";
    p += "Dimensión cultural:**" + std::string(dimension) + "**\n\n";
    p += "Por favor, extrae del texto solo los elementos relevantes que estén claramente relacionados con esta "
         "dimensión cultural.\n\n";
    p += "Escribe las características en español, siguiendo este formato:\n\n";
    p += "[Título breve de la característica]\n\n";
    p += "[Descripción clara y concisa en español]\n\n";
    p += "Fuente de información: [Frase, palabra clave o idea tomada directamente del texto original]\n\n";
    p += "Escribe siempre en español.\n\n";
    p += "Texto de la página web:\n\n";
    p += fenced(body);
    return p;
  }
  if (language == "zh") {
    p += "我将提供一篇网络文章。请从中提取与" + std::string(culture) + "文化中“" + std::string(dimension) +
         "”这一文化维度相关的关键特征和内容，并在不同的标题下清晰地呈现这些特征。\n\n";
    p += "每个特征都应以一个标题开头：\n\n标题\n然后在其下列出以下要点：\n\n";
    p += "特征描述：\n\n信息来源：（引用原文，并尽可能注明段落。）\n\n";
    p += "内容应结构清晰、逻辑连贯。如果信息不足以支持某个特征，请不要编造内容。\n\n";
    p += "文章如下：\n\n";
    p += fenced(body);
    return p;
  }
  p += "I will provide a web article. Please extract the key characteristics and content related to the cultural "
       "dimension \"" + std::string(dimension) + "\" in " + std::string(culture) +
       " culture from it. Present these features clearly under distinct headings.\n\n";
  p += "Each feature should begin with a section titled:\n\nTitle\nThen list the following points below:\n\n";
  p += "Description of the feature:\n\n";
  p += "Source of information: (Quote the original text and indicate the paragraph if possible.)\n\n";
  p += "The content should be well-structured and logically coherent.\n";
  p += "If the information is insufficient to support a certain feature, do not fabricate content.\n";
  if (language != "en" && !language.empty()) p += "Write the features in language: " + std::string(language) + ".\n";
  p += "\nThe article is as follows:\n\n";
  p += fenced(body);
  return p;
}

std::string verify_prompt(std::string_view dimension, std::string_view statement, std::string_view quote,
                          std::string_view body) {
  std::string p;
  p += "Check a cultural knowledge statement against the web page it was extracted from.\n";
  p += "Cultural dimension: " + std::string(dimension) + "\n";
  p += "Statement: " + std::string(statement) + "\n";
  p += "Quoted evidence: " + std::string(quote) + "\n\n";
  p += "Answer on the first line with exactly one verdict token:\n";
  p += "ENTAILED - the page supports the statement\n";
  p += "NOT_ENTAILED - the page does not support, or contradicts, the statement\n";
  p += "WRONG_DIMENSION - the page supports the statement but it is not about the stated dimension\n";
  p += "Then give a one-sentence rationale on the next line.\n\n";
  p += "Source page:\n";
  p += fenced(body);
  return p;
}

std::string cluster_label_prompt(std::string_view culture, std::string_view dimension,
                                 const std::vector<std::string>& statements) {
  std::string p;
  p += "The following knowledge statements about \"" + std::string(dimension) + "\" in " + std::string(culture) +
       " culture form one group.\n";
  p += "Reply with a short label of at most 6 words naming what they have in common. Reply with the label only.\n\n";
  p += "Statements:\n";
  for (const auto& s : statements) p += "- " + s + "\n";
  return p;
}

std::string question_instruction(ContentType type) {
  switch (type) {
    case ContentType::kFactual:
      return "Based on the context, think through all relevant cultural points step by step and generate a factual "
             "question. The question type can include single-choice, true/false, or fill-in-the-blank. Ensure that "
             "the question stem is clear, the options are plausible but misleading (distractors), and the answer is "
             "accurate.";
    case ContentType::kConceptual:
      return "Based on the context, think through all relevant cultural points step by step and generate a conceptual "
             "explanation question. The question should focus on the learner's understanding of the concepts, "
             "structures, or values behind cultural phenomena, rather than simple memorization. Suitable formats "
             "include multiple-choice or true/false questions. Ensure the question is thought-provoking and the "
             "answer is well-justified.";
    case ContentType::kMisleading:
      return "Based on the context, think through all relevant cultural points step by step and generate a misleading "
             "question to assess whether learners can identify cultural misunderstandings, stereotypes, or biases. "
             "The question should focus on learners' critical thinking about culture, identifying which statements "
             "or behaviors reflect misunderstandings, oversimplifications, biases, or stereotypes, and guide them "
             "toward more accurate or respectful understandings. Possible formats include multiple-choice, "
             "true/false, case analysis, or short-answer questions.";
    case ContentType::kMultiHop:
      return "Based on the context, think through all relevant cultural points step by step and generate a multi-hop "
             "reasoning question to assess whether the learner can synthesize multiple cultural elements and "
             "understand the deeper logic or internal connections among cultural phenomena. The question should "
             "prompt learners to start from multiple information points, integrate cultural knowledge, and perform "
             "logical analysis, comparison, or generalization. Scenario-based, integrated analysis, or comparative "
             "reasoning questions are recommended.";
  }
  return {};
}

std::string format_directive(FormatType format) {
  switch (format) {
    case FormatType::kMultipleChoice:
      return "Format: MULTIPLE_CHOICE. Write a single-choice question with four options on separate lines labeled "
             "A) to D). The reference answer is the letter of the correct option.";
    case FormatType::kTrueFalse:
      return "Format: TRUE_FALSE. Write one statement to be judged true or false. The reference answer is True or "
             "False.";
    case FormatType::kShortAnswer:
      return "Format: SHORT_ANSWER. Write a short-answer question; a fill-in-the-blank stem with the blank marked "
             "____ is allowed. The reference answer is a brief phrase or sentence.";
    case FormatType::kEssay:
      return "Format: ESSAY. Write an open essay question. The reference answer is a few sentences covering the key "
             "points.";
  }
  return {};
}

std::string generation_prompt(std::string_view language, ContentType type, FormatType format,
                              const std::vector<ContextLine>& context) {
  std::string ctx;
  for (const auto& c : context) ctx += "- [" + c.dimension + "] " + c.statement + "\n";
  std::string p;
  if (language == "es") {
    p += "Tarea: Responde en español.\n";
    p += question_instruction(type) + "\n";
    p += format_directive(format) + "\n\n";
    p += "Nota:\n\n";
    p += "1. La pregunta debe evitar mencionar explícitamente conceptos, terminología o características culturales, "
         "para evaluar de forma efectiva la comprensión del estudiante sobre los rasgos culturales.\n\n";
    p += "2. Se debe proporcionar una respuesta de referencia después de la pregunta.\n\n";
  } else {
    p += language == "en" || language.empty() ? std::string("Task: Answer in English.\n")
                                              : "Task: Answer in language: " + std::string(language) + ".\n";
    p += question_instruction(type) + "\n";
    p += format_directive(format) + "\n\n";
    p += "Note:\n\n";
    p += "1. The question should avoid explicitly mentioning cultural concepts, terminology, or characteristics, in "
         "order to effectively assess the student's understanding of cultural traits.\n\n";
    p += "2. A reference answer should be provided after the question.\n\n";
  }
  p += "Context:\n\n'''\n" + ctx + "'''\n\n";
  p += "Question:\n\nReference Answer:\n";
  return p;
}

std::string strict_reminder() {
  return "\nReminder: your previous reply could not be parsed. Reply with exactly two sections. The first starts "
         "with the line \"Question:\" and the second with \"Reference Answer:\". For multiple-choice questions list "
         "the options as A) to D) inside the question section and give only the letter as the reference answer. "
         "For true/false questions answer only True or False.\n";
}

std::string qc_prompt(const QcInput& in) {
  std::string p;
  p += "Review an evaluation item for logical consistency with its reference knowledge.\n";
  p += "Check that (a) the question can be answered from the reference knowledge, (b) the reference answer follows "
       "from the question and the knowledge, (c) no contradiction or reasoning error arises among the question, the "
       "answer and the knowledge, and (d) the question does not explicitly name the cultural concept it tests.\n";
  p += "Answer on the first line with exactly one verdict token: CONSISTENT, UNANSWERABLE, WRONG_ANSWER, "
       "CONTRADICTION or LEAKS_CONCEPT. Then give a one-sentence rationale on the next line.\n\n";
  p += "Reference knowledge:\n";
  for (const auto& k : in.knowledge) p += "- " + k + "\n";
  p += "\nQuestion:\n" + in.question_text + "\n";
  if (!in.options.empty()) {
    p += "\nOptions:\n";
    for (const auto& [label, txt] : in.options) p += label + ") " + txt + "\n";
  }
  p += "\nFormat: " + std::string(to_string(in.format)) + "\n";
  p += "Reference Answer: " + in.reference_answer + "\n";
  return p;
}

std::string answer_instruction(FormatType format, std::string_view language) {
  if (language == "es") {
    switch (format) {
      case FormatType::kMultipleChoice: return "Responde con la letra de la opción correcta.";
      case FormatType::kTrueFalse: return "Responde Verdadero o Falso.";
      case FormatType::kShortAnswer: return "Responde brevemente.";
      case FormatType::kEssay: return "Responde con un breve ensayo.";
    }
  }
  if (language == "zh") {
    switch (format) {
      case FormatType::kMultipleChoice: return "请回答正确选项的字母。";
      case FormatType::kTrueFalse: return "请回答“正确”或“错误”。";
      case FormatType::kShortAnswer: return "请简要回答。";
      case FormatType::kEssay: return "请写一篇简短的论述作答。";
    }
  }
  switch (format) {
    case FormatType::kMultipleChoice: return "Answer with the letter of the correct option.";
    case FormatType::kTrueFalse: return "Answer True or False.";
    case FormatType::kShortAnswer: return "Answer briefly.";
    case FormatType::kEssay: return "Answer in a short essay.";
  }
  return {};
}

std::string judge_prompt(std::string_view question, std::string_view reference_answer, std::string_view test_answer) {
  std::string p;
  p += "You are grading an answer to a question about cultural knowledge.\n";
  p += "Compare the test answer with the reference answer and decide whether the content of the test answer "
       "conflicts with the cultural knowledge in the reference answer. If a conflict exists, the test answer is "
       "incorrect. If there is no conflict and the key content of the test answer aligns with the reference answer, "
       "it is correct.\n";
  p += "Reply on the first line with exactly CORRECT or INCORRECT. On the second line write \"Conflict: yes\" or "
       "\"Conflict: no\". Then give a brief rationale.\n\n";
  p += "Question:\n" + std::string(question) + "\n\n";
  p += "Reference Answer:\n" + std::string(reference_answer) + "\n\n";
  p += "Test Answer:\n" + std::string(test_answer) + "\n";
  return p;
}

std::optional<std::string> parse_verdict_token(std::string_view response, const std::vector<std::string>& allowed) {
  for (const auto& line : text::split_lines(response)) {
    const std::string cleaned = clean_verdict_line(line);
    if (cleaned.empty()) continue;
    std::size_t end = 0;
    while (end < cleaned.size() &&
           (std::isalnum(static_cast<unsigned char>(cleaned[end])) || cleaned[end] == '_'))
      ++end;
    const std::string token = cleaned.substr(0, end);
    if (end < cleaned.size()) {
      const char next = cleaned[end];
      if (!(next == ' ' || next == '.' || next == ':' || next == '-' || next == ',' || next == '!' || next == ';'))
        return std::nullopt;
    }
    for (const auto& a : allowed)
      if (token == a) return a;
    return std::nullopt;
  }
  return std::nullopt;
}

std::string rationale_after_verdict(std::string_view response) {
  const auto lines = text::split_lines(text::trim(response));
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < lines.size(); ++i) rest.push_back(lines[i]);
  return text::trim(text::join(rest, "\n"));
}

std::string between_fences(std::string_view prompt, std::string_view fence) {
  const std::string open = std::string(fence) + "\n";
  const auto start = prompt.find(open);
  if (start == std::string_view::npos) return {};
  const auto body_start = start + open.size();
  const std::string close = "\n" + std::string(fence);
  const auto end = prompt.find(close, body_start);
  if (end == std::string_view::npos) return std::string(prompt.substr(body_start));
  return std::string(prompt.substr(body_start, end - body_start));
}

std::string section_after(std::string_view prompt, std::string_view header,
                          const std::vector<std::string>& stop_headers) {
  const auto lines = text::split_lines(prompt);
  std::vector<std::string> out;
  bool inside = false;
  for (const auto& line : lines) {
    const std::string t = text::trim(line);
    if (!inside) {
      if (text::starts_with_ci(t, header)) {
        inside = true;
        const std::string rest = text::trim(std::string_view(t).substr(header.size()));
        if (!rest.empty()) out.push_back(rest);
      }
      continue;
    }
    bool stop = false;
    for (const auto& s : stop_headers)
      if (text::starts_with_ci(t, s)) stop = true;
    if (stop) break;
    out.push_back(line);
  }
  return text::trim(text::join(out, "\n"));
}

std::string line_value(std::string_view prompt, std::string_view key) {
  for (const auto& line : text::split_lines(prompt)) {
    const std::string t = text::trim(line);
    if (text::starts_with_ci(t, key)) return text::trim(std::string_view(t).substr(key.size()));
  }
  return {};
}

}  // namespace culturescope::prompts
