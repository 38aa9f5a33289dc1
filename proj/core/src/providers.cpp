#include "culturescope/providers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <set>
#include <thread>

#include "culturescope/digest.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

namespace {

std::string format_utc(std::int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

constexpr std::int64_t kFakeEpoch = 1735689600;  // 2025-01-01T00:00:00Z

std::string join_url(const std::string& base, std::string_view path) {
  if (base.ends_with(path)) return base;
  if (!base.empty() && base.back() == '/') return base + std::string(path.substr(1));
  return base + std::string(path);
}

std::string url_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

Json parse_body(const HttpResponse& r, const std::string& context) {
  try {
    return Json::parse(r.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kTransport, context + ": malformed JSON response: " + e.what());
  }
}

}  // namespace

std::string_view to_string(LlmTask task) {
  switch (task) {
    case LlmTask::kGeneric: return "generic";
    case LlmTask::kFilter: return "filter";
    case LlmTask::kSummarize: return "summarize";
    case LlmTask::kVerify: return "verify";
    case LlmTask::kClusterLabel: return "cluster_label";
    case LlmTask::kGenerate: return "generate";
    case LlmTask::kQualityCheck: return "quality_check";
    case LlmTask::kAnswer: return "answer";
    case LlmTask::kJudge: return "judge";
  }
  return "generic";
}

void ChatRequest::validate() const {
  if (user_text.empty()) throw Error(ErrorCode::kPrecondition, "chat request user_text must be nonempty");
  if (max_output_tokens < 1) throw Error(ErrorCode::kPrecondition, "max_output_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kPrecondition, "temperature must be non-negative");
}

std::string request_digest(const ChatRequest& r) {
  return short_digest({r.system_text, r.user_text, r.language, std::to_string(r.max_output_tokens),
                       std::to_string(r.temperature), to_string(r.task)});
}

// ---------------------------------------------------------------------------

Millis SystemClock::now() {
  return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(Millis d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

std::string SystemClock::timestamp() {
  return format_utc(std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count());
}

Millis FakeClock::now() {
  std::lock_guard lock(mu_);
  return now_;
}

void FakeClock::sleep_for(Millis d) {
  std::lock_guard lock(mu_);
  if (d.count() > 0) now_ += d;
  sleeps_.push_back(d);
}

std::string FakeClock::timestamp() {
  std::lock_guard lock(mu_);
  return format_utc(kFakeEpoch + now_.count() / 1000);
}

std::vector<Millis> FakeClock::sleeps() const {
  std::lock_guard lock(mu_);
  return sleeps_;
}

RateLimiter::RateLimiter(int requests_per_minute, Clock& clock) : limit_(requests_per_minute), clock_(clock) {
  if (limit_ < 1) throw Error(ErrorCode::kPrecondition, "requests_per_minute must be >= 1");
}

void RateLimiter::acquire() {
  constexpr Millis kWindow{60000};
  std::lock_guard lock(mu_);
  while (true) {
    const Millis now = clock_.now();
    while (!window_.empty() && now - window_.front() >= kWindow) window_.pop_front();
    if (static_cast<int>(window_.size()) < limit_) {
      window_.push_back(now);
      return;
    }
    clock_.sleep_for(window_.front() + kWindow - now);
  }
}

Millis backoff_delay(const RetryPolicy& policy, int attempt, Rng& rng) {
  const double exp = static_cast<double>(policy.base_delay.count()) * std::ldexp(1.0, std::min(attempt, 30));
  const double cap = std::min(exp, static_cast<double>(policy.max_delay.count()));
  return Millis{static_cast<std::int64_t>(rng.uniform01() * cap)};
}

// ---------------------------------------------------------------------------

void CallLog::record(CallRecord r) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(r));
}

std::vector<CallRecord> CallLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t CallLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

void CallLog::write_jsonl(const std::filesystem::path& path) const {
  for (const auto& r : records()) {
    append_jsonl(path, Json{{"provider", r.provider_id},
                            {"operation", r.operation},
                            {"request_digest", r.request_digest},
                            {"latency_ms", r.latency_ms},
                            {"outcome", r.outcome}});
  }
}

CallRunner::CallRunner(std::string provider_id, RetryPolicy policy, Clock& clock, CallLog* log,
                       std::shared_ptr<RateLimiter> limiter, std::uint64_t jitter_seed)
    : provider_id_(std::move(provider_id)),
      policy_(policy),
      clock_(clock),
      log_(log),
      limiter_(std::move(limiter)),
      rng_(jitter_seed) {}

void CallRunner::log(const std::string& operation, const std::string& digest, Millis start, std::string outcome) {
  if (!log_) return;
  log_->record(CallRecord{provider_id_, operation, digest,
                          static_cast<double>((clock_.now() - start).count()), std::move(outcome)});
}

void CallRunner::sleep_backoff(int attempt) {
  Millis d;
  {
    std::lock_guard lock(rng_mu_);
    d = backoff_delay(policy_, attempt, rng_);
  }
  clock_.sleep_for(d);
}

// ---------------------------------------------------------------------------

void raise_for_status(const HttpResponse& r, const std::string& context) {
  if (r.status >= 200 && r.status < 300) return;
  const std::string msg = context + ": HTTP " + std::to_string(r.status);
  if (r.status == 401 || r.status == 403) throw Error(ErrorCode::kAuth, msg);
  if (r.status == 429) throw Error(ErrorCode::kRateLimit, msg);
  if (r.status == 408 || r.status == 504) throw Error(ErrorCode::kTimeout, msg);
  if (r.status >= 500 || r.status == 0) throw Error(ErrorCode::kTransport, msg);
  throw Error(ErrorCode::kRequest, msg + ": " + text::utf8_truncate(r.body, 200));
}

std::string resolve_credential(const ProviderConfig& config) {
  if (config.credential_ref.empty()) throw Error(ErrorCode::kAuth, "provider has no credential_ref configured");
  const char* v = std::getenv(config.credential_ref.c_str());
  if (!v || !*v) throw Error(ErrorCode::kAuth, "environment variable " + config.credential_ref + " is not set");
  return v;
}

std::vector<SearchResult> finalize_results(std::vector<SearchResult> raw, int top_k) {
  if (top_k < 1) throw Error(ErrorCode::kPrecondition, "top_k must be >= 1");
  std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  std::vector<SearchResult> out;
  std::set<std::string> seen;
  for (auto& r : raw) {
    if (static_cast<int>(out.size()) >= top_k) break;
    if (r.url.empty() || !seen.insert(r.url).second) continue;
    out.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kPrecondition, "embedding dimensionality mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// ---------------------------------------------------------------------------

LiveChatProvider::LiveChatProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock,
                                   CallLog* log, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      runner_("live:" + config_.model, RetryPolicy{config_.max_retries}, clock, log, std::move(limiter)) {}

ChatResponse LiveChatProvider::chat(const ChatRequest& request) {
  request.validate();
  const std::string key = resolve_credential(config_);
  Json body;
  body["model"] = config_.model;
  body["max_tokens"] = request.max_output_tokens;
  body["temperature"] = request.temperature;
  body["messages"] = Json::array();
  if (!request.system_text.empty()) body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
  body["messages"].push_back({{"role", "user"}, {"content", request.user_text}});
  HttpRequest http{"POST", join_url(config_.endpoint, "/chat/completions"),
                   {{"Authorization", "Bearer " + key}, {"Content-Type", "application/json"}},
                   body.dump(), config_.timeout_seconds};
  return runner_.run("chat:" + std::string(to_string(request.task)), request_digest(request), [&] {
    const auto resp = transport_->send(http);
    raise_for_status(resp, "chat");
    const Json j = parse_body(resp, "chat");
    ChatResponse out;
    out.provider_id = id();
    if (j.contains("choices") && !j["choices"].empty()) {
      const auto& msg = j["choices"][0].value("message", Json::object());
      if (msg.contains("content") && msg["content"].is_string()) out.text = msg["content"].get<std::string>();
    }
    if (j.contains("usage")) {
      out.token_counts.input = j["usage"].value("prompt_tokens", 0);
      out.token_counts.output = j["usage"].value("completion_tokens", 0);
    }
    return out;
  });
}

LiveSearchProvider::LiveSearchProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock,
                                       CallLog* log, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      runner_("live-search", RetryPolicy{config_.max_retries}, clock, log, std::move(limiter)) {}

std::vector<SearchResult> LiveSearchProvider::search(const QuerySpec& query, int top_k) {
  if (top_k < 1) throw Error(ErrorCode::kPrecondition, "top_k must be >= 1");
  const std::string key = resolve_credential(config_);
  std::string url = config_.endpoint + (config_.endpoint.find('?') == std::string::npos ? "?" : "&");
  url += "q=" + url_encode(query.query_text) + "&num=" + std::to_string(top_k) + "&key=" + url_encode(key);
  if (!config_.engine_id.empty()) url += "&cx=" + url_encode(config_.engine_id);
  if (!query.language.empty()) url += "&hl=" + url_encode(query.language);
  HttpRequest http{"GET", url, {}, "", config_.timeout_seconds};
  auto raw = runner_.run("search", short_digest({query.query_text, query.language}), [&] {
    const auto resp = transport_->send(http);
    raise_for_status(resp, "search");
    const Json j = parse_body(resp, "search");
    std::vector<SearchResult> results;
    for (const char* field : {"items", "organic"}) {
      if (!j.contains(field) || !j[field].is_array()) continue;
      int rank = 0;
      for (const auto& item : j[field]) {
        SearchResult r;
        r.url = item.value("link", item.value("url", ""));
        r.title = item.value("title", "");
        r.snippet = item.value("snippet", "");
        r.rank = item.value("position", ++rank);
        results.push_back(std::move(r));
      }
    }
    return results;
  });
  return finalize_results(std::move(raw), top_k);
}

LiveEmbedder::LiveEmbedder(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock,
                           CallLog* log, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      runner_("live-embed:" + config_.model, RetryPolicy{config_.max_retries}, clock, log, std::move(limiter)) {}

std::vector<std::vector<double>> LiveEmbedder::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kPrecondition, "embed requires at least one text");
  for (std::size_t i = 0; i < texts.size(); ++i)
    if (texts[i].size() > config_.max_text_bytes)
      throw Error(ErrorCode::kPrecondition, "text at index " + std::to_string(i) + " exceeds the provider limit");
  const std::string key = resolve_credential(config_);
  Json body{{"model", config_.model}, {"input", texts}};
  HttpRequest http{"POST", join_url(config_.endpoint, "/embeddings"),
                   {{"Authorization", "Bearer " + key}, {"Content-Type", "application/json"}},
                   body.dump(), config_.timeout_seconds};
  return runner_.run("embed", short_digest(texts), [&] {
    const auto resp = transport_->send(http);
    raise_for_status(resp, "embed");
    const Json j = parse_body(resp, "embed");
    std::vector<std::vector<double>> out(texts.size());
    for (const auto& row : j.value("data", Json::array())) {
      const auto idx = row.value("index", std::size_t{0});
      if (idx < out.size()) out[idx] = row.value("embedding", std::vector<double>{});
    }
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].empty() || out[i].size() != out[0].size())
        throw Error(ErrorCode::kTransport, "embedding response missing or ragged at index " + std::to_string(i));
    return out;
  });
}

// ---------------------------------------------------------------------------

MockSearchProvider::MockSearchProvider(std::map<std::string, std::vector<SearchResult>> corpus, CallLog* log)
    : log_(log) {
  for (auto& [q, results] : corpus) corpus_[normalize_query(q)] = std::move(results);
}

MockSearchProvider MockSearchProvider::from_file(const std::filesystem::path& path, CallLog* log) {
  const Json doc = read_json_file(path);
  std::map<std::string, std::vector<SearchResult>> corpus;
  for (const auto& [query, results] : doc.at("queries").items()) {
    auto& bucket = corpus[query];
    int rank = 0;
    for (const auto& r : results) {
      bucket.push_back(SearchResult{r.at("url").get<std::string>(), r.value("title", ""), r.value("snippet", ""),
                                    r.value("rank", ++rank)});
    }
  }
  return MockSearchProvider(std::move(corpus), log);
}

std::string MockSearchProvider::normalize_query(std::string_view q) { return text::normalize_for_match(text::trim(q)); }

std::vector<SearchResult> MockSearchProvider::search(const QuerySpec& query, int top_k) {
  if (top_k < 1) throw Error(ErrorCode::kPrecondition, "top_k must be >= 1");
  if (log_) log_->record({id(), "search", short_digest({query.query_text, query.language}), 0.0, "ok"});
  auto it = corpus_.find(normalize_query(query.query_text));
  if (it == corpus_.end()) return {};
  return finalize_results(it->second, top_k);
}

HashEmbedder::HashEmbedder(std::size_t dimensions, std::size_t max_text_bytes, CallLog* log)
    : dimensions_(dimensions), max_text_bytes_(max_text_bytes), log_(log) {
  if (dimensions_ == 0) throw Error(ErrorCode::kPrecondition, "embedding dimensionality must be positive");
}

std::vector<double> HashEmbedder::embed_one(std::string_view s) const {
  std::vector<double> v(dimensions_, 0.0);
  for (const auto& tok : text::tokenize(s)) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : tok) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    v[h % dimensions_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

std::vector<std::vector<double>> HashEmbedder::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kPrecondition, "embed requires at least one text");
  for (std::size_t i = 0; i < texts.size(); ++i)
    if (texts[i].size() > max_text_bytes_)
      throw Error(ErrorCode::kPrecondition, "text at index " + std::to_string(i) + " exceeds the provider limit");
  if (log_) log_->record({id(), "embed", short_digest(texts), 0.0, "ok"});
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

ScriptedChatProvider::ScriptedChatProvider(Script script, std::string id, CallLog* log)
    : script_(std::move(script)), id_(std::move(id)), log_(log) {}

ChatResponse ScriptedChatProvider::chat(const ChatRequest& request) {
  request.validate();
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  ChatResponse out;
  out.text = script_(request);
  out.provider_id = id_;
  out.token_counts = {static_cast<std::int64_t>(text::tokenize(request.user_text).size()),
                      static_cast<std::int64_t>(text::tokenize(out.text).size())};
  if (log_) log_->record({id_, "chat:" + std::string(to_string(request.task)), request_digest(request), 0.0, "ok"});
  return out;
}

std::size_t ScriptedChatProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace culturescope
