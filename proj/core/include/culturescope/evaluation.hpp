#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/providers.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/schema.hpp"

namespace culturescope {

struct EvalRunConfig {
  std::string model_id;
  std::string dataset_ref;
  std::string dataset_digest;
  std::string language;
  int injection_count = 0;
  std::string judge_model_id;
  std::uint64_t seed = 0;
  std::optional<int> max_items;
  int max_output_tokens = 1024;
  bool allow_self_judge = false;
  int workers = 4;

  void validate() const;  // Error(kConfig)
};

void to_json(nlohmann::json& j, const EvalRunConfig& c);
void from_json(const nlohmann::json& j, EvalRunConfig& c);
std::string config_digest(const EvalRunConfig& c);

struct ModelResponse {
  std::string item_id;
  std::string raw_text;
  std::string parsed_answer;
  bool parse_ok = false;
  bool transport_failed = false;
};

enum class GradingMode { kObjectiveMatch, kJudge };
std::string_view to_string(GradingMode m);

struct EvalRecord {
  std::string item_id;
  bool correct = false;
  GradingMode grading_mode = GradingMode::kObjectiveMatch;
  std::optional<std::string> judge_rationale;
  std::optional<bool> conflict_flag;
  std::string raw_text;
  std::string parsed_answer;
  bool parse_ok = true;
  bool transport_failed = false;
  bool undecided = false;
  int references_injected = 0;
  int injection_shortfall = 0;
  bool operator==(const EvalRecord&) const = default;
};

void to_json(nlohmann::json& j, const EvalRecord& r);
void from_json(const nlohmann::json& j, EvalRecord& r);

struct EvalRun {
  EvalRunConfig config;
  std::vector<EvalRecord> records;
  std::int64_t n = 0;
  double accuracy = 0.0;
};

struct BuiltPrompt {
  std::string text;
  int reference_count = 0;
};

// k == 0: bare question, options and answer instruction. k > 0: a
// "Reference:" block listing each statement, then "Question:".
BuiltPrompt build_prompt(const QuestionItem& item, const std::vector<std::string>& injection);

// Number of numbered statements inside a prompt's Reference block.
int count_reference_statements(std::string_view prompt);

// Item's linked statements in stored order, truncated to k; missing ids
// simply reduce what is available.
std::vector<std::string> select_injection(const QuestionItem& item, const KnowledgeBase& kb, int k);

// Deterministic cascade: exact label, leading label with punctuation,
// "answer is X" phrasing, unique parenthesized label, unique option text.
// TRUE_FALSE yields "true"/"false". nullopt when nothing or several match.
std::optional<std::string> parse_objective(std::string_view raw_text, FormatType format,
                                           const std::vector<QuestionOption>& options);

ModelResponse ask_model(const QuestionItem& item, const std::vector<std::string>& injection, ChatProvider& chat,
                        const EvalRunConfig& config);

struct JudgeOutcome {
  bool correct = false;
  std::string rationale;
  std::optional<bool> conflict;
  bool undecided = false;
};

JudgeOutcome judge_subjective(std::string_view question, std::string_view reference_answer,
                              std::string_view test_answer, ChatProvider& chat);

// Mean of the per-record indicator; Error(kUndefinedMetric) when empty.
double accuracy(const std::vector<EvalRecord>& records);

enum class GroupKey { kLanguage, kLayer, kCategory, kTopicAspect, kContentType, kFormat };
inline constexpr GroupKey kAllGroupKeys[] = {GroupKey::kLanguage,    GroupKey::kLayer,       GroupKey::kCategory,
                                             GroupKey::kTopicAspect, GroupKey::kContentType, GroupKey::kFormat};
std::string_view to_string(GroupKey k);
std::optional<GroupKey> parse_group_key(std::string_view s);

struct GroupRow {
  std::string group;  // node id or enum/language value
  std::string label;  // display label (category abbreviation, node name, ...)
  std::int64_t n = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
  bool operator==(const GroupRow&) const = default;
};

// Rows in schema order (hierarchy keys) or enum order; Error(kIntegrity)
// when a record's item or dimension cannot be resolved.
std::vector<GroupRow> group_accuracy(const std::vector<EvalRecord>& records, const std::vector<QuestionItem>& items,
                                     const Schema& schema, GroupKey key);

struct PromptLogEntry {
  std::string item_id;
  int requested_k = 0;
  int reference_count = 0;
  int shortfall = 0;
  std::string prompt;
};

void to_json(nlohmann::json& j, const PromptLogEntry& e);

struct EvalOptions {
  std::filesystem::path run_log;                  // resumable record log; empty disables
  std::vector<PromptLogEntry>* prompt_log = nullptr;
};

// Evaluates items sorted by item_id (a seeded subset when max_items is set).
// Items already present in the run log are not asked again.
EvalRun evaluate(const std::vector<QuestionItem>& items, const KnowledgeBase& kb, ChatProvider& model,
                 ChatProvider* judge, const EvalRunConfig& config, const EvalOptions& options = {});

std::vector<EvalRun> injection_sweep(const std::vector<QuestionItem>& items, const KnowledgeBase& kb,
                                     const std::vector<int>& ks, ChatProvider& model, ChatProvider* judge,
                                     const EvalRunConfig& config, const std::filesystem::path& run_dir = {},
                                     std::map<int, std::vector<PromptLogEntry>>* prompt_logs = nullptr);

nlohmann::json run_summary_json(const EvalRun& run);
// Writes records.jsonl and summary.json under `dir`.
void save_run(const EvalRun& run, const std::filesystem::path& dir);
EvalRun load_run(const std::filesystem::path& dir);

}  // namespace culturescope
