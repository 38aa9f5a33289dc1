#include "culturescope/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

namespace culturescope::text {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      // English
      "a", "an", "the", "and", "or", "of", "in", "on", "at", "to", "for", "with", "by", "from",
      "is", "are", "was", "were", "be", "been", "being", "it", "its", "this", "that", "these",
      "those", "as", "into", "than", "then", "such", "their", "they", "them", "there", "which",
      "who", "whom", "what", "when", "where", "how", "why", "also", "can", "could", "would",
      "should", "will", "may", "might", "do", "does", "did", "has", "have", "had", "but", "if",
      "so", "very", "more", "most", "many", "much", "some", "any", "each", "other", "about",
      "over", "between", "during", "after", "before", "often", "while", "both", "all", "your",
      "you", "we", "our", "he", "she", "his", "her", "i", "me", "my", "one", "s",
      // Spanish
      "el", "la", "los", "las", "un", "una", "unos", "unas", "y", "o", "de", "del", "en", "al",
      "con", "por", "para", "es", "son", "se", "su", "sus", "que", "como", "lo", "le", "les",
      "este", "esta", "estos", "estas", "muy", "mas", "más", "pero", "también", "entre"};
  return kWords;
}

const std::unordered_set<std::string_view>& negations() {
  static const std::unordered_set<std::string_view> kWords = {
      "not", "never", "no", "nor", "none", "cannot", "nobody", "nunca", "jamás", "nadie", "ninguno", "ninguna"};
  return kWords;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string normalize_for_match(std::string_view s) { return to_lower(collapse_whitespace(s)); }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) nl = s.size();
    std::string line(s.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty() && !s.empty() && s.back() == '\n') lines.pop_back();
  return lines;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string> split_sentences(std::string_view s) {
  static const std::array<std::string_view, 3> kCjkStops = {"\xE3\x80\x82", "\xEF\xBC\x81", "\xEF\xBC\x9F"};
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) out.push_back(collapse_whitespace(t));
    current.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    bool cjk = false;
    for (auto stop : kCjkStops) {
      if (s.substr(i, stop.size()) == stop) {
        current.append(stop);
        i += stop.size() - 1;
        cjk = true;
        break;
      }
    }
    if (cjk) {
      flush();
      continue;
    }
    if (c == '\n' && i + 1 < s.size() && s[i + 1] == '\n') {
      flush();
      continue;
    }
    current.push_back(c);
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == s.size() || is_space(static_cast<unsigned char>(s[i + 1])))) {
      flush();
    }
  }
  flush();
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool is_stopword(std::string_view token) { return stopwords().count(token) > 0; }

std::string stem(std::string_view token) {
  std::string t(token);
  if (t.size() > 4 && t.ends_with("ies")) return t.substr(0, t.size() - 3) + "y";
  if (t.size() > 3 && t.back() == 's' && t[t.size() - 2] != 's') t.pop_back();
  return t;
}

std::vector<std::string> content_terms(std::string_view s) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(s)) {
    if (is_stopword(tok)) continue;
    if (tok.size() < 2 && static_cast<unsigned char>(tok[0]) < 0x80) continue;
    out.push_back(stem(tok));
  }
  return out;
}

double term_coverage(std::string_view reference, std::string_view candidate) {
  const auto ref = content_terms(reference);
  if (ref.empty()) return 0.0;
  const auto cand_vec = content_terms(candidate);
  const std::set<std::string> cand(cand_vec.begin(), cand_vec.end());
  const std::set<std::string> ref_set(ref.begin(), ref.end());
  std::size_t hit = 0;
  for (const auto& t : ref_set) hit += cand.count(t);
  return static_cast<double>(hit) / static_cast<double>(ref_set.size());
}

int negation_count(std::string_view s) {
  int n = 0;
  for (const auto& tok : tokenize(s)) n += negations().count(tok) ? 1 : 0;
  const std::string lower = to_lower(s);
  for (std::size_t pos = lower.find("n't"); pos != std::string::npos; pos = lower.find("n't", pos + 3)) ++n;
  return n;
}

std::string utf8_truncate(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut));
}

}  // namespace culturescope::text
