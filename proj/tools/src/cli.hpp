#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/providers.hpp"

namespace culturescope::cli {

namespace fs = std::filesystem;

struct ToolkitConfig {
  fs::path config_path;
  fs::path schema_path;
  fs::path workspace_dir;
  std::string culture;
  std::string language;
  std::uint64_t seed = 0;

  ProviderConfig chat;
  ProviderConfig judge;
  ProviderConfig search;
  ProviderConfig embed;
  ProviderConfig fetch;

  int top_k = kDefaultTopK;
  fs::path seed_urls;
  fs::path source_rules;
  bool include_sub_dimensions = false;
  std::string query_template;
  std::size_t char_budget = 20000;
  int per_host_delay_ms = 1000;
  std::vector<std::string> dimensions;  // empty: every leaf
  int max_instances_per_dimension = 0;  // verified instances kept per leaf; 0 keeps all

  double dedup_threshold = 0.92;
  int min_k = 2;
  int max_k = 8;
  int fixed_k = 0;

  fs::path plan_path;
  std::vector<int> injection_ks{0};
  int max_output_tokens = 1024;
  int workers = 4;

  nlohmann::json raw;

  // workspace/<culture>/<language>
  fs::path root() const;
  fs::path stage_dir(const std::string& stage) const { return root() / stage; }
};

struct ConfigViolation {
  std::string field;
  std::string message;
};

struct ConfigCheck {
  std::optional<ToolkitConfig> config;
  std::vector<ConfigViolation> violations;
  bool ok() const { return config.has_value() && violations.empty(); }
};

// Parse errors propagate as Error(kParse) with line context; everything
// else is reported as violations. No provider is contacted.
ConfigCheck validate_config(const fs::path& path);

std::string toolkit_config_digest(const ToolkitConfig& config);

// argv excludes the program name. Exit codes: 0 ok, 1 runtime, 2 usage/config.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace culturescope::cli
