#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace culturescope::text {

std::string to_lower(std::string_view s);  // ASCII only; UTF-8 bytes untouched
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Lowercased, whitespace-collapsed form used for containment checks.
std::string normalize_for_match(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_sentences(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercased word tokens. Bytes >= 0x80 count as word characters so UTF-8
// letters stay inside words.
std::vector<std::string> tokenize(std::string_view s);

// Tokens minus English/Spanish stopwords, with a crude plural strip.
std::vector<std::string> content_terms(std::string_view s);

bool is_stopword(std::string_view token);
std::string stem(std::string_view token);

// Fraction of `reference` content terms present in `candidate`; 0 when the
// reference has none.
double term_coverage(std::string_view reference, std::string_view candidate);

// Counts negation cues ("not", "never", "no", "nunca", ...).
int negation_count(std::string_view s);

// Truncates to at most `max_bytes`, never splitting a UTF-8 sequence.
std::string utf8_truncate(std::string_view s, std::size_t max_bytes);

}  // namespace culturescope::text
