#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/providers.hpp"
#include "culturescope/schema.hpp"
#include "culturescope/types.hpp"

namespace culturescope {

struct RawDocument {
  std::string doc_id;
  std::string url;
  std::string title;
  std::string body_text;
  std::string dimension_id;
  std::string culture;
  std::string language;
  SourceCategory source_category = SourceCategory::kOther;
  std::string fetched_at;
  std::optional<int> search_rank;  // absent for curated seed URLs
};

void to_json(nlohmann::json& j, const RawDocument& d);
void from_json(const nlohmann::json& j, RawDocument& d);

struct ParsedUrl {
  std::string scheme;
  std::string host;  // lowercased
  std::string path;
};

// Accepts http(s) URLs with a plausible host; Error(kParse) otherwise.
ParsedUrl parse_url(std::string_view url);

struct SourceRule {
  enum class Kind { kHostSuffix, kHostContains, kTitleKeyword };
  Kind kind = Kind::kHostSuffix;
  std::string pattern;
  SourceCategory category = SourceCategory::kOther;
};

// Ordered rule table: host rules in order, then title keywords, then OTHER.
class SourceClassifier {
 public:
  explicit SourceClassifier(std::vector<SourceRule> rules);
  static SourceClassifier defaults();
  static SourceClassifier from_file(const std::filesystem::path& path);
  static std::vector<SourceRule> default_rules();

  SourceCategory classify(std::string_view url, std::string_view title) const;
  const std::vector<SourceRule>& rules() const { return rules_; }

 private:
  std::vector<SourceRule> rules_;
};

SourceCategory classify_source(std::string_view url, std::string_view title);

struct CleanedPage {
  std::string title;
  std::string text;
};

// Keeps headings, paragraphs and list items; drops script/style/nav and
// similar chrome; falls back to all visible text when the page has no
// block markup. Output is truncated to `char_budget` bytes.
CleanedPage clean_html(std::string_view html, std::size_t char_budget = 20000);

struct FetchResult {
  std::optional<std::string> html;
  std::string error;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResult fetch(const std::string& url) = 0;
};

// url -> html map, loaded from {"pages": {url: html}}.
class FixtureFetcher final : public Fetcher {
 public:
  explicit FixtureFetcher(std::map<std::string, std::string> pages, CallLog* log = nullptr);
  static FixtureFetcher from_file(const std::filesystem::path& path, CallLog* log = nullptr);
  FetchResult fetch(const std::string& url) override;

 private:
  std::map<std::string, std::string> pages_;
  CallLog* log_;
};

// HTTP GET with a per-host minimum delay.
class LiveFetcher final : public Fetcher {
 public:
  LiveFetcher(std::shared_ptr<HttpTransport> transport, Clock& clock, Millis per_host_delay, CallLog* log,
              double timeout_seconds = 30.0);
  FetchResult fetch(const std::string& url) override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  Clock& clock_;
  Millis per_host_delay_;
  CallLog* log_;
  double timeout_seconds_;
  std::mutex mu_;
  std::map<std::string, Millis> last_fetch_;
};

struct PlanOptions {
  bool include_sub_dimensions = false;
  std::string query_template;  // empty: per-language default
};

// One QuerySpec per leaf dimension in leaf order; sub-dimension specs follow
// their parent when enabled.
std::vector<QuerySpec> plan_retrieval(const Schema& schema, std::string_view culture, std::string_view language,
                                      const PlanOptions& options = {});

struct SeedUrl {
  std::string url;
  std::optional<std::string> dimension_id;
};

// One URL per line, optionally followed by whitespace and a dimension id;
// '#' starts a comment.
std::vector<SeedUrl> parse_seed_urls(std::string_view content);
std::vector<SeedUrl> load_seed_urls(const std::filesystem::path& path);

struct FetchOptions {
  int top_k = kDefaultTopK;
  std::size_t char_budget = 20000;
};

struct FetchOutcome {
  std::vector<RawDocument> documents;
  std::vector<std::string> warnings;
};

// Curated seeds for the query's dimension come first, then search hits; the
// merged list is URL-deduplicated and capped at top_k. Individual fetch or
// cleaning failures become warnings. `search` may be null (seed-only mode).
FetchOutcome fetch_documents(const QuerySpec& spec, SearchProvider* search, Fetcher& fetcher,
                             const std::vector<SeedUrl>& seeds, const SourceClassifier& classifier, Clock& clock,
                             const FetchOptions& options = {});

enum class FilterDecision { kAccepted, kRejected };

struct FilterVerdict {
  FilterDecision decision = FilterDecision::kRejected;
  std::string reason;  // ACCEPT, OFF_TOPIC, BOILERPLATE, WRONG_CULTURE, UNDECIDED
  std::string rationale;
};

FilterVerdict llm_filter(const RawDocument& doc, std::string_view dimension_name, ChatProvider& chat);

}  // namespace culturescope
