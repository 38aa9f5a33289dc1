#include "culturescope/schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>
#include <tuple>

#include "culturescope/digest.hpp"
#include "culturescope/error.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

namespace {

constexpr std::array<std::string_view, 5> kLevelNames = {"LAYER", "CATEGORY", "TOPIC_ASPECT", "DIMENSION",
                                                         "SUB_DIMENSION"};

std::string describe(const LevelCounts& c) {
  std::ostringstream ss;
  ss << "layers=" << c.layers << " categories=" << c.categories << " topic_aspects=" << c.topic_aspects
     << " dimensions=" << c.dimensions << " sub_dimensions=" << c.sub_dimensions;
  return ss.str();
}

std::string title_case(std::string_view s) {
  static const std::set<std::string, std::less<>> kSmall = {"a", "an", "and", "at", "by", "for", "in",
                                                            "of", "on", "or", "the", "to", "with"};
  std::string out;
  bool first_word = true;
  for (const auto& word : text::split(s, ' ')) {
    if (!out.empty()) out.push_back(' ');
    std::string w = word;
    if (!w.empty() && (first_word || !kSmall.count(text::to_lower(w))))
      w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
    first_word = false;
  }
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

}  // namespace

std::string_view to_string(Level level) { return kLevelNames[static_cast<std::size_t>(level)]; }

std::string_view to_string(Origin origin) { return origin == Origin::kCanonical ? "CANONICAL" : "EXPANDED"; }

std::optional<Level> parse_level(std::string_view s) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i)
    if (kLevelNames[i] == s) return static_cast<Level>(i);
  return std::nullopt;
}

std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "CANONICAL") return Origin::kCanonical;
  if (s == "EXPANDED") return Origin::kExpanded;
  return std::nullopt;
}

Schema::Schema(std::string version, std::vector<DimensionNode> nodes, bool canonical,
               std::optional<std::string> culture_tag, std::vector<std::string> report_columns)
    : version_(std::move(version)),
      nodes_(std::move(nodes)),
      canonical_(canonical),
      culture_tag_(std::move(culture_tag)),
      report_columns_(std::move(report_columns)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].node_id, i);
}

const DimensionNode* Schema::find(std::string_view node_id) const {
  auto it = index_.find(std::string(node_id));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const DimensionNode& Schema::at(std::string_view node_id) const {
  if (const auto* n = find(node_id)) return *n;
  throw Error(ErrorCode::kLookup, "unknown schema node '" + std::string(node_id) + "'");
}

const DimensionNode* Schema::find_by_name(std::string_view name, std::optional<Level> level) const {
  const std::string wanted = text::to_lower(name);
  for (const auto& n : nodes_)
    if ((!level || n.level == *level) && text::to_lower(n.name) == wanted) return &n;
  return nullptr;
}

const DimensionNode* Schema::ancestor(std::string_view node_id, Level level) const {
  const DimensionNode* cur = find(node_id);
  for (int steps = 0; cur && steps <= 5; ++steps) {
    if (cur->level == level) return cur;
    if (!cur->parent_id) return nullptr;
    cur = find(*cur->parent_id);
  }
  return nullptr;
}

std::vector<const DimensionNode*> Schema::children(std::string_view node_id) const {
  std::vector<const DimensionNode*> out;
  for (const auto& n : nodes_)
    if (n.parent_id && *n.parent_id == node_id) out.push_back(&n);
  return out;
}

bool Schema::is_within(std::string_view node_id, std::string_view root_id) const {
  const DimensionNode* cur = find(node_id);
  for (int steps = 0; cur && steps <= 5; ++steps) {
    if (cur->node_id == root_id) return true;
    if (!cur->parent_id) return false;
    cur = find(*cur->parent_id);
  }
  return false;
}

LevelCounts Schema::counts() const {
  LevelCounts c;
  for (const auto& n : nodes_) {
    switch (n.level) {
      case Level::kLayer: ++c.layers; break;
      case Level::kCategory: ++c.categories; break;
      case Level::kTopicAspect: ++c.topic_aspects; break;
      case Level::kDimension: ++c.dimensions; break;
      case Level::kSubDimension: ++c.sub_dimensions; break;
    }
  }
  return c;
}

std::vector<const DimensionNode*> Schema::report_categories() const {
  std::vector<const DimensionNode*> cats;
  for (const auto& n : nodes_)
    if (n.level == Level::kCategory) cats.push_back(&n);
  if (report_columns_.empty()) return cats;
  std::vector<const DimensionNode*> ordered;
  for (const auto& col : report_columns_)
    for (const auto* c : cats)
      if (c->abbrev == col || c->name == col) ordered.push_back(c);
  // Categories missing from the column list keep file order at the end.
  for (const auto* c : cats)
    if (std::find(ordered.begin(), ordered.end(), c) == ordered.end()) ordered.push_back(c);
  return ordered;
}

bool operator==(const Schema& a, const Schema& b) {
  return a.version_ == b.version_ && a.nodes_ == b.nodes_ && a.canonical_ == b.canonical_ &&
         a.culture_tag_ == b.culture_tag_ && a.report_columns_ == b.report_columns_;
}

Schema parse_schema(const nlohmann::json& doc) {
  static const std::set<std::string, std::less<>> kTopFields = {"version", "canonical", "culture_tag",
                                                                "report_columns", "nodes"};
  static const std::set<std::string, std::less<>> kNodeFields = {"id",     "level",  "name", "parent",
                                                                 "origin", "abbrev", "names"};
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "schema document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kTopFields.count(key)) throw Error(ErrorCode::kParse, "unknown top-level schema field '" + key + "'");
  if (!doc.contains("version") || !doc["version"].is_string())
    throw Error(ErrorCode::kParse, "schema is missing a string 'version'");
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw Error(ErrorCode::kParse, "schema is missing the 'nodes' array");

  std::vector<DimensionNode> nodes;
  std::size_t position = 0;
  for (const auto& raw : doc["nodes"]) {
    const std::string where = raw.is_object() && raw.contains("id") && raw["id"].is_string()
                                  ? "node '" + raw["id"].get<std::string>() + "'"
                                  : "node #" + std::to_string(position);
    ++position;
    if (!raw.is_object()) throw Error(ErrorCode::kParse, where + ": expected an object");
    for (const auto& [key, _] : raw.items())
      if (!kNodeFields.count(key)) throw Error(ErrorCode::kParse, where + ": unknown field '" + key + "'");
    auto str_field = [&](const char* key) -> std::string {
      if (!raw.contains(key) || !raw[key].is_string())
        throw Error(ErrorCode::kParse, where + ": field '" + key + "' must be a string");
      return raw[key].get<std::string>();
    };
    DimensionNode node;
    node.node_id = str_field("id");
    node.name = str_field("name");
    const auto level = parse_level(str_field("level"));
    if (!level) throw Error(ErrorCode::kParse, where + ": unknown level '" + raw["level"].get<std::string>() + "'");
    node.level = *level;
    const auto origin = parse_origin(str_field("origin"));
    if (!origin) throw Error(ErrorCode::kParse, where + ": unknown origin '" + raw["origin"].get<std::string>() + "'");
    node.origin = *origin;
    if (raw.contains("parent") && !raw["parent"].is_null()) {
      if (!raw["parent"].is_string()) throw Error(ErrorCode::kParse, where + ": 'parent' must be a string or null");
      node.parent_id = raw["parent"].get<std::string>();
    }
    if (raw.contains("abbrev")) node.abbrev = str_field("abbrev");
    if (raw.contains("names")) {
      if (!raw["names"].is_object()) throw Error(ErrorCode::kParse, where + ": 'names' must be an object");
      for (const auto& [lang, name] : raw["names"].items()) {
        if (!name.is_string()) throw Error(ErrorCode::kParse, where + ": localized name must be a string");
        node.localized_names[lang] = name.get<std::string>();
      }
    }
    nodes.push_back(std::move(node));
  }

  std::optional<std::string> culture_tag;
  if (doc.contains("culture_tag") && !doc["culture_tag"].is_null()) culture_tag = doc["culture_tag"].get<std::string>();
  std::vector<std::string> columns;
  if (doc.contains("report_columns")) columns = doc["report_columns"].get<std::vector<std::string>>();
  const bool canonical = doc.value("canonical", false);

  Schema schema(doc["version"].get<std::string>(), std::move(nodes), canonical, culture_tag, std::move(columns));
  const auto violations = validate(schema);
  if (!violations.empty()) {
    std::string msg = "schema validation failed:";
    for (const auto& v : violations) msg += "\n  [" + v.rule + "] " + v.node_id + ": " + v.message;
    throw Error(ErrorCode::kValidation, msg);
  }
  return schema;
}

Schema load_schema(const std::filesystem::path& path) { return parse_schema(read_json_file(path)); }

nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : schema.nodes()) {
    nlohmann::json j;
    j["id"] = n.node_id;
    j["level"] = to_string(n.level);
    j["name"] = n.name;
    j["parent"] = n.parent_id ? nlohmann::json(*n.parent_id) : nlohmann::json(nullptr);
    j["origin"] = to_string(n.origin);
    if (!n.abbrev.empty()) j["abbrev"] = n.abbrev;
    if (!n.localized_names.empty()) j["names"] = n.localized_names;
    nodes.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["version"] = schema.version();
  doc["canonical"] = schema.canonical();
  doc["culture_tag"] = schema.culture_tag() ? nlohmann::json(*schema.culture_tag()) : nlohmann::json(nullptr);
  doc["report_columns"] = schema.report_columns();
  doc["nodes"] = std::move(nodes);
  return doc;
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  write_json_file(path, schema_to_json(schema));
}

std::vector<SchemaViolation> validate(const Schema& schema) {
  std::vector<SchemaViolation> out;
  std::map<std::string, std::size_t> seen;
  for (const auto& n : schema.nodes()) {
    if (++seen[n.node_id] == 2)
      out.push_back({n.node_id, "unique_id", "node_id appears more than once"});
  }
  for (const auto& n : schema.nodes()) {
    if (n.name.empty()) out.push_back({n.node_id, "name_nonempty", "node name is empty"});
    if (n.level == Level::kLayer) {
      if (n.parent_id) out.push_back({n.node_id, "layer_root", "LAYER nodes must not have a parent"});
    } else if (!n.parent_id) {
      out.push_back({n.node_id, "parent_exists", "non-LAYER node has no parent"});
    } else if (const auto* p = schema.find(*n.parent_id); !p) {
      out.push_back({n.node_id, "parent_exists", "parent '" + *n.parent_id + "' does not exist"});
    } else if (static_cast<int>(p->level) + 1 != static_cast<int>(n.level)) {
      out.push_back({n.node_id, "parent_level",
                     "parent level " + std::string(to_string(p->level)) + " is not one step above " +
                         std::string(to_string(n.level))});
    }
    if (n.level == Level::kSubDimension && n.origin != Origin::kExpanded)
      out.push_back({n.node_id, "origin", "SUB_DIMENSION nodes must have origin EXPANDED"});
    if (n.level != Level::kSubDimension && n.origin != Origin::kCanonical)
      out.push_back({n.node_id, "origin", "only SUB_DIMENSION nodes may have origin EXPANDED"});
  }
  if (schema.canonical()) {
    auto c = schema.counts();
    c.sub_dimensions = 0;
    if (!(c == kCanonicalCounts))
      out.push_back({"<schema>", "canonical_counts",
                     "canonical schema must have layers=3 categories=5 topic_aspects=18 dimensions=140; got " +
                         describe(c)});
  }
  return out;
}

std::vector<DimensionNode> leaf_dimensions(const Schema& schema, const std::optional<std::string>& under) {
  if (under) (void)schema.at(*under);
  // Per-level positional index in file order.
  std::unordered_map<std::string, std::size_t> pos;
  std::array<std::size_t, 5> counters{};
  for (const auto& n : schema.nodes()) pos.emplace(n.node_id, counters[static_cast<std::size_t>(n.level)]++);
  auto index_of = [&](const DimensionNode& n, Level lvl) -> std::size_t {
    const auto* a = schema.ancestor(n.node_id, lvl);
    return a ? pos.at(a->node_id) : SIZE_MAX;
  };
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::string, std::string>;
  std::vector<std::pair<Key, const DimensionNode*>> keyed;
  for (const auto& n : schema.nodes()) {
    if (n.level != Level::kDimension) continue;
    if (under && !schema.is_within(n.node_id, *under)) continue;
    keyed.push_back({Key{index_of(n, Level::kLayer), index_of(n, Level::kCategory), index_of(n, Level::kTopicAspect),
                         text::to_lower(n.name), n.node_id},
                     &n});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<DimensionNode> out;
  out.reserve(keyed.size());
  for (const auto& [_, n] : keyed) out.push_back(*n);
  return out;
}

std::vector<DimensionNode> sub_dimensions(const Schema& schema) {
  std::vector<DimensionNode> out;
  for (const auto& dim : leaf_dimensions(schema)) {
    std::vector<DimensionNode> subs;
    for (const auto* c : schema.children(dim.node_id))
      if (c->level == Level::kSubDimension) subs.push_back(*c);
    std::sort(subs.begin(), subs.end(), [](const auto& a, const auto& b) {
      return std::pair(text::to_lower(a.name), a.node_id) < std::pair(text::to_lower(b.name), b.node_id);
    });
    out.insert(out.end(), subs.begin(), subs.end());
  }
  return out;
}

std::string default_query_template(std::string_view language) {
  if (language == "es") return "{dimension} en la cultura {culture}";
  if (language == "zh") return "{culture}文化中的{dimension}";
  return "{dimension} in {culture} culture";
}

QuerySpec build_query(const DimensionNode& dimension, std::string_view culture, std::string_view language,
                      std::string_view query_template) {
  if (!dimension.is_leaf())
    throw Error(ErrorCode::kLevel, "build_query requires a DIMENSION or SUB_DIMENSION node, got " +
                                       std::string(to_string(dimension.level)) + " '" + dimension.node_id + "'");
  if (text::trim(culture).empty()) throw Error(ErrorCode::kPrecondition, "culture must be nonempty");
  if (query_template.find("{culture}") == std::string_view::npos ||
      (query_template.find("{dimension}") == std::string_view::npos &&
       query_template.find("{Dimension}") == std::string_view::npos))
    throw Error(ErrorCode::kPrecondition, "query template must contain {dimension} and {culture}");
  const std::string name = display_name(dimension, language);
  std::string q(query_template);
  replace_all(q, "{Dimension}", title_case(name));
  replace_all(q, "{dimension}", name);
  replace_all(q, "{culture}", text::trim(culture));
  return QuerySpec{dimension.node_id, text::trim(culture), std::string(language), q};
}

std::string display_name(const DimensionNode& node, std::string_view language) {
  if (auto it = node.localized_names.find(std::string(language)); it != node.localized_names.end()) return it->second;
  return node.name;
}

QuerySpec build_query(const DimensionNode& dimension, std::string_view culture, std::string_view language) {
  return build_query(dimension, culture, language, default_query_template(language));
}

std::string slugify(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      if (pending && !out.empty()) out.push_back('_');
      pending = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending = true;
    }
  }
  return out;
}

std::string sub_dimension_id(std::string_view dimension_id, std::string_view label) {
  std::string slug = slugify(label);
  if (slug.empty()) slug = short_digest({label});
  return std::string(dimension_id) + "/" + slug;
}

Schema expand_schema(const Schema& schema, const std::vector<KeywordLabel>& keywords,
                     std::optional<std::string> culture_tag) {
  std::vector<DimensionNode> nodes = schema.nodes();
  std::set<std::string> ids;
  for (const auto& n : nodes) ids.insert(n.node_id);
  for (const auto& kw : keywords) {
    const auto& parent = schema.at(kw.dimension_id);
    if (parent.level != Level::kDimension)
      throw Error(ErrorCode::kLookup, "'" + kw.dimension_id + "' is not a DIMENSION node");
    const std::string label = text::collapse_whitespace(kw.label);
    if (label.empty()) throw Error(ErrorCode::kPrecondition, "empty keyword label for " + kw.dimension_id);
    const std::string id = sub_dimension_id(kw.dimension_id, label);
    if (!ids.insert(id).second) continue;
    DimensionNode node;
    node.node_id = id;
    node.level = Level::kSubDimension;
    node.name = label;
    node.parent_id = kw.dimension_id;
    node.origin = Origin::kExpanded;
    nodes.push_back(std::move(node));
  }
  if (!culture_tag) culture_tag = schema.culture_tag();
  if (keywords.empty()) culture_tag = schema.culture_tag();
  return Schema(schema.version(), std::move(nodes), schema.canonical(), std::move(culture_tag),
                schema.report_columns());
}

}  // namespace culturescope
