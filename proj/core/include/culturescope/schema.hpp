#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace culturescope {

enum class Level { kLayer = 0, kCategory = 1, kTopicAspect = 2, kDimension = 3, kSubDimension = 4 };
enum class Origin { kCanonical, kExpanded };

std::string_view to_string(Level level);
std::string_view to_string(Origin origin);
std::optional<Level> parse_level(std::string_view s);
std::optional<Origin> parse_origin(std::string_view s);

struct DimensionNode {
  std::string node_id;
  Level level = Level::kDimension;
  std::string name;
  std::optional<std::string> parent_id;
  Origin origin = Origin::kCanonical;
  // Display metadata: short label used as a report column (categories).
  std::string abbrev;
  // Localized display names keyed by language code.
  std::map<std::string, std::string> localized_names;

  bool is_leaf() const { return level == Level::kDimension || level == Level::kSubDimension; }
  friend bool operator==(const DimensionNode&, const DimensionNode&) = default;
};

struct SchemaViolation {
  std::string node_id;
  std::string rule;
  std::string message;
  friend bool operator==(const SchemaViolation&, const SchemaViolation&) = default;
};

struct LevelCounts {
  std::size_t layers = 0;
  std::size_t categories = 0;
  std::size_t topic_aspects = 0;
  std::size_t dimensions = 0;
  std::size_t sub_dimensions = 0;
  friend bool operator==(const LevelCounts&, const LevelCounts&) = default;
};

// Immutable after construction; every accessor is const and thread-safe.
class Schema {
 public:
  Schema() = default;
  Schema(std::string version, std::vector<DimensionNode> nodes, bool canonical = false,
         std::optional<std::string> culture_tag = std::nullopt,
         std::vector<std::string> report_columns = {});

  const std::string& version() const { return version_; }
  bool canonical() const { return canonical_; }
  const std::optional<std::string>& culture_tag() const { return culture_tag_; }
  const std::vector<std::string>& report_columns() const { return report_columns_; }
  const std::vector<DimensionNode>& nodes() const { return nodes_; }

  const DimensionNode* find(std::string_view node_id) const;
  // Throws Error(kLookup) for unknown ids.
  const DimensionNode& at(std::string_view node_id) const;
  const DimensionNode* find_by_name(std::string_view name, std::optional<Level> level = std::nullopt) const;

  // Walks parents until a node at `level` is found; nullptr when none.
  const DimensionNode* ancestor(std::string_view node_id, Level level) const;
  std::vector<const DimensionNode*> children(std::string_view node_id) const;
  bool is_within(std::string_view node_id, std::string_view root_id) const;

  LevelCounts counts() const;
  // Category nodes in report column order (falls back to file order).
  std::vector<const DimensionNode*> report_categories() const;

  friend bool operator==(const Schema& a, const Schema& b);

 private:
  std::string version_;
  std::vector<DimensionNode> nodes_;
  bool canonical_ = false;
  std::optional<std::string> culture_tag_;
  std::vector<std::string> report_columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct QuerySpec {
  std::string dimension_id;
  std::string culture;
  std::string language;
  std::string query_text;
  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

inline constexpr LevelCounts kCanonicalCounts{3, 5, 18, 140, 0};

// Parses the JSON schema document. Unknown fields, bad levels and broken
// references raise Error(kParse) or Error(kValidation) naming the node.
Schema parse_schema(const nlohmann::json& doc);
Schema load_schema(const std::filesystem::path& path);
nlohmann::json schema_to_json(const Schema& schema);
void save_schema(const Schema& schema, const std::filesystem::path& path);

// Empty iff every structural invariant holds.
std::vector<SchemaViolation> validate(const Schema& schema);

// DIMENSION nodes ordered by (layer index, category index, aspect index,
// lowercase name); optionally restricted to the subtree under `under`.
std::vector<DimensionNode> leaf_dimensions(const Schema& schema,
                                           const std::optional<std::string>& under = std::nullopt);

// SUB_DIMENSION nodes grouped after their parent in leaf order.
std::vector<DimensionNode> sub_dimensions(const Schema& schema);

// Localized name for `language`, else the canonical name.
std::string display_name(const DimensionNode& node, std::string_view language);

// Template placeholders: {dimension} (as written), {Dimension} (title case),
// {culture}.
std::string default_query_template(std::string_view language);
QuerySpec build_query(const DimensionNode& dimension, std::string_view culture, std::string_view language,
                      std::string_view query_template);
QuerySpec build_query(const DimensionNode& dimension, std::string_view culture, std::string_view language);

struct KeywordLabel {
  std::string dimension_id;
  std::string label;
  friend bool operator==(const KeywordLabel&, const KeywordLabel&) = default;
  friend auto operator<=>(const KeywordLabel&, const KeywordLabel&) = default;
};

// Adds one EXPANDED SUB_DIMENSION per unique (dimension, label), id
// namespaced by the parent dimension. Leaves the input untouched.
Schema expand_schema(const Schema& schema, const std::vector<KeywordLabel>& keywords,
                     std::optional<std::string> culture_tag = std::nullopt);

std::string slugify(std::string_view s);
std::string sub_dimension_id(std::string_view dimension_id, std::string_view label);

}  // namespace culturescope
