#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/extraction.hpp"
#include "culturescope/providers.hpp"
#include "culturescope/random.hpp"
#include "culturescope/schema.hpp"
#include "culturescope/types.hpp"

namespace culturescope {

struct QuestionOption {
  std::string label;
  std::string text;
  bool operator==(const QuestionOption&) const = default;
};

struct QuestionItem {
  std::string item_id;
  std::string culture;
  std::string language;
  ContentType content_type = ContentType::kFactual;
  FormatType format = FormatType::kMultipleChoice;
  std::string question_text;
  std::vector<QuestionOption> options;  // multiple choice only
  std::string reference_answer;         // option label, "true"/"false", or free text
  std::vector<std::string> knowledge_ids;
  std::string dimension_id;
  QcStatus qc_status = QcStatus::kPending;
  std::string qc_reason;
  std::string qc_rationale;
  bool operator==(const QuestionItem&) const = default;
};

void to_json(nlohmann::json& j, const QuestionItem& q);
void from_json(const nlohmann::json& j, QuestionItem& q);

// Error(kIntegrity) when an item is not well formed for its format.
void check_item(const QuestionItem& item);

std::string make_item_id(std::string_view culture, std::string_view language, ContentType type,
                         std::vector<std::string> knowledge_ids, std::string_view question_text);

class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<KnowledgeInstance> instances);

  const std::vector<KnowledgeInstance>& instances() const { return instances_; }
  const KnowledgeInstance* find(std::string_view kb_id) const;
  // VERIFIED instances sorted by kb_id, optionally for one dimension.
  std::vector<const KnowledgeInstance*> verified(const std::optional<std::string>& dimension_id = std::nullopt) const;
  std::vector<std::string> verified_dimensions() const;
  // Digest over (kb_id, statement, qc_status) of every instance.
  const std::string& version() const { return version_; }

 private:
  std::vector<KnowledgeInstance> instances_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string version_;
};

struct GenerationPlan {
  std::string culture;
  std::string language;
  int total_items = 0;
  std::map<ContentType, int> items_per_type;            // empty: equal split of total_items
  std::map<ContentType, std::vector<FormatType>> formats;  // missing types use defaults
  std::map<ContentType, int> context_k;                 // missing types use defaults
  std::uint64_t seed = 0;
  int retry_budget = -1;  // extra attempts per bucket; negative selects max(10, 2 * count)
  int workers = 4;

  int count(ContentType type) const;
  std::vector<FormatType> allowed_formats(ContentType type) const;
  int k_for(ContentType type) const;
  int budget_for(ContentType type) const;
  void validate() const;  // Error(kConfig)
};

std::vector<FormatType> default_formats(ContentType type);
int default_context_k(ContentType type);

GenerationPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const GenerationPlan& plan);

struct ContextSample {
  std::vector<KnowledgeInstance> instances;
  bool fallback = false;    // topic-aspect neighbours were added
  std::size_t shortfall = 0;  // k minus what the widened scope could supply
};

// k distinct VERIFIED instances drawn uniformly. With a dimension, the
// dimension is drawn from first and its topic aspect tops it up.
ContextSample sample_context(const KnowledgeBase& kb, const Schema& schema,
                             const std::optional<std::string>& dimension_id, std::size_t k, Rng& rng);
ContextSample sample_context(const KnowledgeBase& kb, const Schema& schema,
                             const std::optional<std::string>& dimension_id, std::size_t k, std::uint64_t seed);

struct ParsedQuestion {
  std::string question_text;
  std::vector<QuestionOption> options;
  std::string reference_answer;
};

// Error(kParse) when a section is missing or the answer does not resolve.
ParsedQuestion parse_generated(std::string_view model_text, FormatType format);

// Normalizes a true/false answer in English, Spanish or Chinese.
std::optional<bool> parse_truth_token(std::string_view text);

QuestionItem generate_question(const std::vector<KnowledgeInstance>& context, ContentType type, FormatType format,
                               std::string_view language, ChatProvider& chat, const Schema& schema);

struct QuestionQc {
  QcStatus status = QcStatus::kPending;
  std::string reason;
  std::string rationale;
};

QuestionQc qc_question(const QuestionItem& item, const KnowledgeBase& kb, ChatProvider& chat);

struct DatasetManifest {
  std::string culture;
  std::string language;
  std::uint64_t seed = 0;
  nlohmann::json plan;
  std::string kb_version;
  std::string schema_version;
  std::map<std::string, int> counts_by_type;
  int item_count = 0;
  int rejected_count = 0;
  int generation_failures = 0;
  std::string dataset_digest;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

struct Dataset {
  DatasetManifest manifest;
  std::vector<QuestionItem> items;     // VERIFIED, sorted by item_id
  std::vector<QuestionItem> rejected;  // QC rejections kept for audit
};

std::string dataset_digest(const std::vector<QuestionItem>& items);

// Fills every content-type bucket with VERIFIED items; Error(kPartialDataset)
// lists the shortfall when a bucket exhausts its retry budget.
Dataset build_dataset(const KnowledgeBase& kb, const Schema& schema, const GenerationPlan& plan, ChatProvider& chat);

// Writes items.jsonl, rejected.jsonl and manifest.json under `dir`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
// Accepts the dataset directory or its manifest.json; verifies the digest.
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace culturescope
