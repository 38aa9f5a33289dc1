#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/acquisition.hpp"
#include "culturescope/providers.hpp"
#include "culturescope/schema.hpp"
#include "culturescope/types.hpp"

namespace culturescope {

struct KnowledgeInstance {
  std::string kb_id;
  std::string culture;
  std::string language;
  std::string dimension_id;
  std::string statement;
  std::string source_url;
  std::string source_quote;
  SourceCategory source_category = SourceCategory::kOther;
  std::optional<std::string> cluster_label;
  QcStatus qc_status = QcStatus::kPending;
  std::string qc_reason;  // verdict token once checked
  std::string qc_rationale;

  bool operator==(const KnowledgeInstance&) const = default;
};

void to_json(nlohmann::json& j, const KnowledgeInstance& k);
void from_json(const nlohmann::json& j, KnowledgeInstance& k);

// Throws Error(kIntegrity) when a persisted instance breaks a record invariant.
void check_instance(const KnowledgeInstance& k);

std::string make_kb_id(std::string_view culture, std::string_view language, std::string_view dimension_id,
                       std::string_view statement);

struct Section {
  std::string title;
  std::string description;
  std::string source_quote;

  bool operator==(const Section&) const = default;
};

// Field-name keyed parse of the summary layout in English, Spanish and
// Chinese, with markdown headings and bold titles tolerated.
std::vector<Section> parse_sections(std::string_view model_text);

// Serializes sections in the layout the summary prompt requests.
std::string render_sections(const std::vector<Section>& sections, std::string_view language);

// Removes wrapping quotes and a trailing paragraph marker.
std::string clean_quote(std::string_view quote);

struct ExtractionResult {
  std::vector<KnowledgeInstance> instances;
  std::vector<std::string> warnings;
};

ExtractionResult extract_knowledge(const RawDocument& doc, const DimensionNode& dimension, ChatProvider& chat);

struct QcVerdict {
  QcStatus status = QcStatus::kPending;
  std::string reason;
  std::string rationale;
  bool llm_called = false;
};

bool quote_occurs_in(std::string_view quote, std::string_view body);

QcVerdict verify_instance(const KnowledgeInstance& instance, const RawDocument& doc, std::string_view dimension_name,
                          ChatProvider& chat);

void apply_verdict(KnowledgeInstance& instance, const QcVerdict& verdict);

// Sorts by kb_id and drops repeated ids (first occurrence wins).
void normalize_kb(std::vector<KnowledgeInstance>& kb);

}  // namespace culturescope
