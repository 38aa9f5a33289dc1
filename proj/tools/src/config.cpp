#include <cstdlib>
#include <set>

#include "cli.hpp"
#include "culturescope/digest.hpp"
#include "culturescope/error.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/schema.hpp"

namespace culturescope::cli {

namespace {

using nlohmann::json;

class Checker {
 public:
  explicit Checker(fs::path base) : base_(std::move(base)) {}

  void fail(std::string field, std::string message) { violations.push_back({std::move(field), std::move(message)}); }

  fs::path resolve(const std::string& p) const {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() ? path : (base_ / path).lexically_normal();
  }

  fs::path existing(const json& section, const std::string& key, const std::string& field, bool required) {
    if (!section.contains(key)) {
      if (required) fail(field, "is required");
      return {};
    }
    if (!section[key].is_string()) {
      fail(field, "must be a string path");
      return {};
    }
    fs::path p = resolve(section[key].get<std::string>());
    if (!fs::exists(p)) fail(field, "path does not exist: " + p.string());
    return p;
  }

  template <typename T>
  T get(const json& section, const std::string& key, const std::string& field, T fallback) {
    if (!section.contains(key)) return fallback;
    try {
      return section[key].get<T>();
    } catch (const json::exception&) {
      fail(field, "has the wrong type");
      return fallback;
    }
  }

  void unknown_keys(const json& section, const std::set<std::string>& allowed, const std::string& prefix) {
    if (!section.is_object()) {
      fail(prefix.empty() ? "<root>" : prefix, "must be an object");
      return;
    }
    for (const auto& [k, _] : section.items())
      if (!allowed.count(k)) fail(prefix.empty() ? k : prefix + "." + k, "unknown field");
  }

  std::vector<ConfigViolation> violations;

 private:
  fs::path base_;
};

ProviderConfig provider_section(Checker& c, const json& providers, const std::string& name, bool needs_fixture) {
  ProviderConfig p;
  const std::string field = "providers." + name;
  if (!providers.contains(name)) return p;
  const json& s = providers[name];
  c.unknown_keys(s,
                 {"kind", "endpoint", "credential_ref", "model", "requests_per_minute", "max_retries",
                  "timeout_seconds", "fixture_path", "engine_id", "max_text_bytes"},
                 field);
  if (!s.is_object()) return p;
  p.kind = c.get<std::string>(s, "kind", field + ".kind", "mock");
  p.endpoint = c.get<std::string>(s, "endpoint", field + ".endpoint", "");
  p.credential_ref = c.get<std::string>(s, "credential_ref", field + ".credential_ref", "");
  p.model = c.get<std::string>(s, "model", field + ".model", "");
  p.requests_per_minute = c.get<int>(s, "requests_per_minute", field + ".requests_per_minute", 60);
  p.max_retries = c.get<int>(s, "max_retries", field + ".max_retries", 3);
  p.timeout_seconds = c.get<double>(s, "timeout_seconds", field + ".timeout_seconds", 60.0);
  p.engine_id = c.get<std::string>(s, "engine_id", field + ".engine_id", "");
  p.max_text_bytes = c.get<std::size_t>(s, "max_text_bytes", field + ".max_text_bytes", 8192);
  if (p.kind != "mock" && p.kind != "live") c.fail(field + ".kind", "must be \"mock\" or \"live\"");
  if (p.requests_per_minute < 1) c.fail(field + ".requests_per_minute", "must be >= 1");
  if (p.max_retries < 0) c.fail(field + ".max_retries", "must be >= 0");
  if (p.timeout_seconds <= 0) c.fail(field + ".timeout_seconds", "must be > 0");
  if (p.kind == "live" && name != "fetch") {
    if (p.endpoint.empty()) c.fail(field + ".endpoint", "is required for live providers");
    if (p.credential_ref.empty()) {
      c.fail(field + ".credential_ref", "is required for live providers");
    } else if (!std::getenv(p.credential_ref.c_str())) {
      c.fail(field + ".credential_ref", "environment variable " + p.credential_ref + " is not set");
    }
  }
  if (p.kind == "mock" && needs_fixture) p.fixture_path = c.existing(s, "fixture_path", field + ".fixture_path", true);
  return p;
}

}  // namespace

fs::path ToolkitConfig::root() const { return workspace_dir / slugify(culture) / language; }

ConfigCheck validate_config(const fs::path& path) {
  const json doc = read_json_file(path);
  ConfigCheck out;
  Checker c(fs::absolute(path).parent_path());
  c.unknown_keys(doc,
                 {"schema_path", "culture", "language", "seed", "workspace_dir", "providers", "acquisition",
                  "curation", "generation", "evaluation", "workers"},
                 "");
  if (!doc.is_object()) {
    out.violations = std::move(c.violations);
    return out;
  }

  ToolkitConfig cfg;
  cfg.raw = doc;
  cfg.config_path = path;
  cfg.schema_path = c.existing(doc, "schema_path", "schema_path", true);
  cfg.culture = c.get<std::string>(doc, "culture", "culture", "");
  cfg.language = c.get<std::string>(doc, "language", "language", "");
  if (cfg.culture.empty()) c.fail("culture", "is required");
  if (cfg.language.empty()) c.fail("language", "is required");
  if (doc.contains("seed") && !doc["seed"].is_number_unsigned()) c.fail("seed", "must be a non-negative integer");
  cfg.seed = c.get<std::uint64_t>(doc, "seed", "seed", 0);
  cfg.workspace_dir = c.resolve(c.get<std::string>(doc, "workspace_dir", "workspace_dir", "workspace"));
  cfg.workers = c.get<int>(doc, "workers", "workers", 4);
  if (cfg.workers < 1) c.fail("workers", "must be >= 1");

  const json providers = doc.value("providers", json::object());
  c.unknown_keys(providers, {"chat", "judge", "search", "embed", "fetch"}, "providers");
  if (providers.is_object()) {
    cfg.chat = provider_section(c, providers, "chat", false);
    cfg.judge = providers.contains("judge") ? provider_section(c, providers, "judge", false) : cfg.chat;
    cfg.search = provider_section(c, providers, "search", true);
    cfg.embed = provider_section(c, providers, "embed", false);
    cfg.fetch = provider_section(c, providers, "fetch", true);
    if (!providers.contains("search")) c.fail("providers.search", "is required");
    if (!providers.contains("fetch")) c.fail("providers.fetch", "is required");
  }

  const json acq = doc.value("acquisition", json::object());
  c.unknown_keys(acq,
                 {"top_k", "seed_urls", "source_rules", "include_sub_dimensions", "query_template", "char_budget",
                  "per_host_delay_ms", "dimensions", "max_instances_per_dimension"},
                 "acquisition");
  if (acq.is_object()) {
    cfg.top_k = c.get<int>(acq, "top_k", "acquisition.top_k", kDefaultTopK);
    if (cfg.top_k < 1) c.fail("acquisition.top_k", "must be >= 1, got " + std::to_string(cfg.top_k));
    cfg.seed_urls = c.existing(acq, "seed_urls", "acquisition.seed_urls", false);
    cfg.source_rules = c.existing(acq, "source_rules", "acquisition.source_rules", false);
    cfg.include_sub_dimensions = c.get<bool>(acq, "include_sub_dimensions", "acquisition.include_sub_dimensions", false);
    cfg.query_template = c.get<std::string>(acq, "query_template", "acquisition.query_template", "");
    const auto budget = c.get<long long>(acq, "char_budget", "acquisition.char_budget", 20000);
    if (budget < 1) c.fail("acquisition.char_budget", "must be >= 1");
    cfg.char_budget = static_cast<std::size_t>(std::max(1LL, budget));
    cfg.per_host_delay_ms = c.get<int>(acq, "per_host_delay_ms", "acquisition.per_host_delay_ms", 1000);
    if (cfg.per_host_delay_ms < 0) c.fail("acquisition.per_host_delay_ms", "must be >= 0");
    cfg.dimensions = c.get<std::vector<std::string>>(acq, "dimensions", "acquisition.dimensions", {});
    cfg.max_instances_per_dimension =
        c.get<int>(acq, "max_instances_per_dimension", "acquisition.max_instances_per_dimension", 0);
    if (cfg.max_instances_per_dimension < 0) c.fail("acquisition.max_instances_per_dimension", "must be >= 0");
  }

  const json cur = doc.value("curation", json::object());
  c.unknown_keys(cur, {"dedup_threshold", "min_k", "max_k", "fixed_k"}, "curation");
  if (cur.is_object()) {
    cfg.dedup_threshold = c.get<double>(cur, "dedup_threshold", "curation.dedup_threshold", 0.92);
    if (cfg.dedup_threshold < 0.0 || cfg.dedup_threshold > 1.0) c.fail("curation.dedup_threshold", "must lie in [0, 1]");
    cfg.min_k = c.get<int>(cur, "min_k", "curation.min_k", 2);
    cfg.max_k = c.get<int>(cur, "max_k", "curation.max_k", 8);
    cfg.fixed_k = c.get<int>(cur, "fixed_k", "curation.fixed_k", 0);
    if (cfg.min_k < 2) c.fail("curation.min_k", "must be >= 2");
    if (cfg.max_k < cfg.min_k) c.fail("curation.max_k", "must be >= min_k");
    if (cfg.fixed_k < 0) c.fail("curation.fixed_k", "must be >= 0");
  }

  const json gen = doc.value("generation", json::object());
  c.unknown_keys(gen, {"plan_path"}, "generation");
  if (gen.is_object()) cfg.plan_path = c.existing(gen, "plan_path", "generation.plan_path", false);

  const json ev = doc.value("evaluation", json::object());
  c.unknown_keys(ev, {"injection_ks", "max_output_tokens"}, "evaluation");
  if (ev.is_object()) {
    cfg.injection_ks = c.get<std::vector<int>>(ev, "injection_ks", "evaluation.injection_ks", {0});
    for (int k : cfg.injection_ks)
      if (k < 0) c.fail("evaluation.injection_ks", "entries must be >= 0");
    cfg.max_output_tokens = c.get<int>(ev, "max_output_tokens", "evaluation.max_output_tokens", 1024);
    if (cfg.max_output_tokens < 1) c.fail("evaluation.max_output_tokens", "must be >= 1");
  }

  if (!cfg.schema_path.empty() && fs::exists(cfg.schema_path) && !cfg.dimensions.empty()) {
    try {
      const Schema schema = load_schema(cfg.schema_path);
      for (const auto& id : cfg.dimensions) {
        const auto* node = schema.find(id);
        if (!node || !node->is_leaf()) c.fail("acquisition.dimensions", "unknown leaf dimension '" + id + "'");
      }
    } catch (const Error& e) {
      c.fail("schema_path", e.what());
    }
  }

  out.violations = std::move(c.violations);
  out.config = std::move(cfg);
  return out;
}

std::string toolkit_config_digest(const ToolkitConfig& config) { return short_digest({config.raw.dump()}); }

}  // namespace culturescope::cli
