#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "culturescope/error.hpp"
#include "culturescope/random.hpp"
#include "culturescope/schema.hpp"

namespace culturescope {

using Millis = std::chrono::milliseconds;

// What a chat call is for. Carried for call logging and so deterministic
// providers can dispatch without sniffing prompt text.
enum class LlmTask { kGeneric, kFilter, kSummarize, kVerify, kClusterLabel, kGenerate, kQualityCheck, kAnswer, kJudge };
std::string_view to_string(LlmTask task);

struct ChatRequest {
  std::string system_text;
  std::string user_text;
  std::string language = "en";
  int max_output_tokens = 1024;
  double temperature = 0.0;
  LlmTask task = LlmTask::kGeneric;

  void validate() const;
};

struct TokenCounts {
  std::int64_t input = 0;
  std::int64_t output = 0;
};

struct ChatResponse {
  std::string text;
  std::string provider_id;
  TokenCounts token_counts;
};

struct SearchResult {
  std::string url;
  std::string title;
  std::string snippet;
  int rank = 0;
};

struct ProviderConfig {
  std::string kind = "mock";  // "mock" or "live"
  std::string endpoint;
  std::string credential_ref;  // name of the environment variable, never the secret
  std::string model;
  int requests_per_minute = 60;
  int max_retries = 3;
  double timeout_seconds = 60.0;
  std::string fixture_path;  // mock search corpus
  std::string engine_id;     // search engine id for live search
  std::size_t max_text_bytes = 8192;

  bool is_mock() const { return kind == "mock"; }
};

// ---------------------------------------------------------------------------
// Time

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() = 0;
  virtual void sleep_for(Millis d) = 0;
  // ISO-8601 UTC timestamp for provenance fields.
  virtual std::string timestamp() = 0;
};

class SystemClock final : public Clock {
 public:
  Millis now() override;
  void sleep_for(Millis d) override;
  std::string timestamp() override;
};

// Time advances only through sleep_for/advance; thread-safe.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(Millis start = Millis{0}) : now_(start) {}
  Millis now() override;
  void sleep_for(Millis d) override;
  std::string timestamp() override;
  void advance(Millis d) { sleep_for(d); }
  std::vector<Millis> sleeps() const;

 private:
  mutable std::mutex mu_;
  Millis now_;
  std::vector<Millis> sleeps_;
};

// Sliding 60-second window limiter. acquire() blocks (via the clock) until
// a slot is free, so calls are delayed, never dropped.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, Clock& clock);
  void acquire();

 private:
  int limit_;
  Clock& clock_;
  std::mutex mu_;
  std::deque<Millis> window_;
};

struct RetryPolicy {
  int max_retries = 3;
  Millis base_delay{500};
  Millis max_delay{60000};
};

// Exponential backoff with full jitter: uniform in [0, min(cap, base*2^attempt)].
Millis backoff_delay(const RetryPolicy& policy, int attempt, Rng& rng);

// ---------------------------------------------------------------------------
// Call log

struct CallRecord {
  std::string provider_id;
  std::string operation;  // chat:<task>, search, embed, fetch
  std::string request_digest;
  double latency_ms = 0.0;
  std::string outcome;  // "ok" or an ErrorCode name
};

class CallLog {
 public:
  void record(CallRecord r);
  std::vector<CallRecord> records() const;
  std::size_t size() const;
  void write_jsonl(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mu_;
  std::vector<CallRecord> records_;
};

// Shared plumbing for every provider: rate limit, retry with backoff, log
// each attempt. Auth and request errors are never retried.
class CallRunner {
 public:
  CallRunner(std::string provider_id, RetryPolicy policy, Clock& clock, CallLog* log,
             std::shared_ptr<RateLimiter> limiter, std::uint64_t jitter_seed = 0x5eed);

  template <typename Fn>
  auto run(const std::string& operation, const std::string& request_digest, Fn&& fn) -> decltype(fn()) {
    for (int attempt = 0;; ++attempt) {
      if (limiter_) limiter_->acquire();
      const Millis start = clock_.now();
      try {
        auto result = fn();
        log(operation, request_digest, start, "ok");
        return result;
      } catch (const Error& e) {
        log(operation, request_digest, start, std::string(to_string(e.code())));
        if (!is_retriable(e.code()) || attempt >= policy_.max_retries) throw;
        sleep_backoff(attempt);
      }
    }
  }

  const std::string& provider_id() const { return provider_id_; }

 private:
  void log(const std::string& operation, const std::string& digest, Millis start, std::string outcome);
  void sleep_backoff(int attempt);

  std::string provider_id_;
  RetryPolicy policy_;
  Clock& clock_;
  CallLog* log_;
  std::shared_ptr<RateLimiter> limiter_;
  std::mutex rng_mu_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// HTTP transport (live providers only)

struct HttpRequest {
  std::string method = "POST";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_seconds = 60.0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws Error(kTimeout) / Error(kTransport) when no response arrives.
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport(std::string user_agent = "culturescope/0.1");

// Maps an HTTP status to the provider error taxonomy; no-op for 2xx.
void raise_for_status(const HttpResponse& response, const std::string& context);

// Reads the secret named by credential_ref; Error(kAuth) when unset.
std::string resolve_credential(const ProviderConfig& config);

// ---------------------------------------------------------------------------
// Provider interfaces

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
  virtual bool is_mock() const { return false; }
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  // At most top_k results, ranks 1..n, URLs unique.
  virtual std::vector<SearchResult> search(const QuerySpec& query, int top_k) = 0;
  virtual std::string id() const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
  virtual std::string id() const = 0;
};

inline constexpr int kDefaultTopK = 5;

// De-duplicates by URL (first rank wins), truncates to top_k, renumbers.
std::vector<SearchResult> finalize_results(std::vector<SearchResult> raw, int top_k);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Live providers

// OpenAI-compatible /chat/completions.
class LiveChatProvider final : public ChatProvider {
 public:
  LiveChatProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock, CallLog* log,
                   std::shared_ptr<RateLimiter> limiter);
  ChatResponse chat(const ChatRequest& request) override;
  std::string id() const override { return "live:" + config_.model; }

 private:
  ProviderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  CallRunner runner_;
};

// JSON search API returning either an "items" (Custom Search) or "organic"
// array of {link, title, snippet}.
class LiveSearchProvider final : public SearchProvider {
 public:
  LiveSearchProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock, CallLog* log,
                     std::shared_ptr<RateLimiter> limiter);
  std::vector<SearchResult> search(const QuerySpec& query, int top_k) override;
  std::string id() const override { return "live-search"; }

 private:
  ProviderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  CallRunner runner_;
};

// OpenAI-compatible /embeddings.
class LiveEmbedder final : public Embedder {
 public:
  LiveEmbedder(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock, CallLog* log,
               std::shared_ptr<RateLimiter> limiter);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string id() const override { return "live-embed:" + config_.model; }

 private:
  ProviderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  CallRunner runner_;
};

// ---------------------------------------------------------------------------
// Deterministic providers

// Serves a fixture corpus keyed by normalized query text.
class MockSearchProvider final : public SearchProvider {
 public:
  explicit MockSearchProvider(std::map<std::string, std::vector<SearchResult>> corpus, CallLog* log = nullptr);
  static MockSearchProvider from_file(const std::filesystem::path& path, CallLog* log = nullptr);
  std::vector<SearchResult> search(const QuerySpec& query, int top_k) override;
  std::string id() const override { return "mock-search"; }
  static std::string normalize_query(std::string_view q);

 private:
  std::map<std::string, std::vector<SearchResult>> corpus_;
  CallLog* log_;
};

// Signed feature hashing of lowercased tokens, L2-normalized.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimensions = 256, std::size_t max_text_bytes = 8192, CallLog* log = nullptr);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string id() const override { return "mock-embed"; }
  std::vector<double> embed_one(std::string_view text) const;

 private:
  std::size_t dimensions_;
  std::size_t max_text_bytes_;
  CallLog* log_;
};

// Chat double driven by a caller-provided function. Used for scripted
// judges/models in tests.
class ScriptedChatProvider final : public ChatProvider {
 public:
  using Script = std::function<std::string(const ChatRequest&)>;
  explicit ScriptedChatProvider(Script script, std::string id = "scripted", CallLog* log = nullptr);
  ChatResponse chat(const ChatRequest& request) override;
  std::string id() const override { return id_; }
  bool is_mock() const override { return true; }
  std::size_t calls() const;

 private:
  Script script_;
  std::string id_;
  CallLog* log_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

std::string request_digest(const ChatRequest& request);

}  // namespace culturescope
