#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/extraction.hpp"
#include "culturescope/providers.hpp"
#include "culturescope/schema.hpp"

namespace culturescope {

inline constexpr double kDefaultDedupThreshold = 0.92;

struct ClusterAssignment {
  std::string kb_id;
  std::string dimension_id;
  int cluster_index = 0;
  std::string cluster_label;
  bool operator==(const ClusterAssignment&) const = default;
};

void to_json(nlohmann::json& j, const ClusterAssignment& a);
void from_json(const nlohmann::json& j, ClusterAssignment& a);

// Greedy near-duplicate removal inside each (dimension, language) group:
// an instance survives when its cosine similarity to every earlier survivor
// is below the threshold. Byte-identical statements always merge; at
// threshold 1.0 nothing else does.
std::vector<KnowledgeInstance> dedup(const std::vector<KnowledgeInstance>& instances, double similarity_threshold,
                                     Embedder& embed);

struct KPolicy {
  int min_k = 2;
  int max_k = 8;
  int fixed_k = 0;  // > 0 bypasses silhouette selection
  int n_init = 4;
  int max_iterations = 100;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
};

// k-means++ seeding, Lloyd iterations, best of n_init restarts.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, Rng& rng, int n_init = 4,
                    int max_iterations = 100);

// Mean silhouette with Euclidean distance; singleton members score 0.
double silhouette_score(const std::vector<std::vector<double>>& points, const std::vector<int>& labels);

// Two highest-frequency content terms, ties broken alphabetically.
std::string tf_label(const std::vector<std::string>& statements, std::string_view exclude = {});

// Clusters one dimension's instances. Labels come from one chat call per
// cluster; mock chat providers get the term-frequency label instead.
std::vector<ClusterAssignment> cluster_dimension(const std::vector<KnowledgeInstance>& instances, Embedder& embed,
                                                 ChatProvider& chat, std::string_view culture,
                                                 std::string_view dimension_name, const KPolicy& policy = {});

std::vector<KeywordLabel> derive_keywords(const std::vector<ClusterAssignment>& assignments);

struct KBStats {
  std::map<std::string, std::int64_t> per_dimension_counts;
  std::map<std::string, std::int64_t> per_source_counts;  // all categories, zeros included
  std::int64_t total_instances = 0;
  std::int64_t dimensions_covered = 0;
  bool operator==(const KBStats&) const = default;
};

void to_json(nlohmann::json& j, const KBStats& s);
void from_json(const nlohmann::json& j, KBStats& s);

KBStats kb_stats(const std::vector<KnowledgeInstance>& instances);

}  // namespace culturescope
