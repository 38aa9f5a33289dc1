#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "culturescope/types.hpp"

namespace culturescope::prompts {

// Delimiter fencing document text in filter/summary/verify prompts.
inline constexpr std::string_view kDocFence = "===";

std::string filter_prompt(std::string_view culture, std::string_view dimension, std::string_view title,
                          std::string_view body);

// Language-specific knowledge summary prompt ("en", "es", "zh"; others
// fall back to English with an output-language line).
std::string summary_prompt(std::string_view language, std::string_view culture, std::string_view dimension,
                           std::string_view body);

std::string verify_prompt(std::string_view dimension, std::string_view statement, std::string_view quote,
                          std::string_view body);

std::string cluster_label_prompt(std::string_view culture, std::string_view dimension,
                                 const std::vector<std::string>& statements);

std::string question_instruction(ContentType type);
std::string format_directive(FormatType format);

struct ContextLine {
  std::string dimension;
  std::string statement;
};

std::string generation_prompt(std::string_view language, ContentType type, FormatType format,
                              const std::vector<ContextLine>& context);
std::string strict_reminder();

struct QcInput {
  std::string question_text;
  std::vector<std::pair<std::string, std::string>> options;  // (label, text)
  std::string reference_answer;
  std::vector<std::string> knowledge;
  FormatType format = FormatType::kMultipleChoice;
};
std::string qc_prompt(const QcInput& input);

std::string answer_instruction(FormatType format, std::string_view language);

std::string judge_prompt(std::string_view question, std::string_view reference_answer, std::string_view test_answer);

// First-line verdict token among `allowed`, ignoring markdown emphasis,
// a "Verdict:" prefix and trailing punctuation. nullopt when the first
// non-empty line does not start with exactly one allowed token.
std::optional<std::string> parse_verdict_token(std::string_view response, const std::vector<std::string>& allowed);

// Text following the first line, used as rationale.
std::string rationale_after_verdict(std::string_view response);

// Helpers for reading prompts back (mock providers, audits).
std::string between_fences(std::string_view prompt, std::string_view fence);
// Text after a line starting with `header` up to the next line that starts
// with any of `stop_headers` (or end).
std::string section_after(std::string_view prompt, std::string_view header,
                          const std::vector<std::string>& stop_headers);
std::string line_value(std::string_view prompt, std::string_view key);

}  // namespace culturescope::prompts
