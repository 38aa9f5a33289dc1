#include "culturescope/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "culturescope/digest.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

void to_json(nlohmann::json& j, const ClusterAssignment& a) {
  j = nlohmann::json{{"kb_id", a.kb_id},
                     {"dimension_id", a.dimension_id},
                     {"cluster_index", a.cluster_index},
                     {"cluster_label", a.cluster_label}};
}

void from_json(const nlohmann::json& j, ClusterAssignment& a) {
  a.kb_id = j.at("kb_id").get<std::string>();
  a.dimension_id = j.at("dimension_id").get<std::string>();
  a.cluster_index = j.at("cluster_index").get<int>();
  a.cluster_label = j.at("cluster_label").get<std::string>();
}

std::vector<KnowledgeInstance> dedup(const std::vector<KnowledgeInstance>& instances, double similarity_threshold,
                                     Embedder& embed) {
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0))
    throw Error(ErrorCode::kPrecondition, "dedup threshold must lie in [0, 1]");
  if (instances.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(instances.size());
  for (const auto& k : instances) texts.push_back(k.statement);
  const auto vectors = embed.embed(texts);
  if (vectors.size() != instances.size())
    throw Error(ErrorCode::kStage, "embedder returned " + std::to_string(vectors.size()) + " vectors for " +
                                       std::to_string(instances.size()) + " statements");

  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> kept_by_group;
  std::vector<KnowledgeInstance> out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto& kept = kept_by_group[{instances[i].dimension_id, instances[i].language}];
    bool duplicate = false;
    for (std::size_t j : kept) {
      if (instances[j].statement == instances[i].statement ||
          (similarity_threshold < 1.0 && cosine_similarity(vectors[i], vectors[j]) >= similarity_threshold)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    kept.push_back(i);
    out.push_back(instances[i]);
  }
  return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KMeansResult kmeans_once(const std::vector<std::vector<double>>& pts, int k, Rng& rng, int max_iterations) {
  const std::size_t n = pts.size();
  KMeansResult r;
  r.centroids.push_back(pts[rng.uniform_index(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(r.centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : r.centroids) best = std::min(best, sq_dist(pts[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.uniform_index(n);
    } else {
      double target = rng.uniform01() * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= d2[pick];
        if (target < 0.0) break;
      }
    }
    r.centroids.push_back(pts[pick]);
  }
  r.labels.assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(pts[i], r.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.labels[i] != best) {
        r.labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    const std::size_t dim = pts[0].size();
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += pts[i][d];
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (counts[c] == 0) continue;  // keep the old centroid for an empty cluster
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] /= static_cast<double>(counts[c]);
      r.centroids[c] = std::move(sums[c]);
    }
  }
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) r.inertia += sq_dist(pts[i], r.centroids[static_cast<std::size_t>(r.labels[i])]);
  return r;
}

// Renumbers labels by first appearance so equal partitions compare equal.
std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

std::string clean_label(std::string_view raw) {
  std::string line;
  for (const auto& l : text::split_lines(raw)) {
    line = text::trim(l);
    if (!line.empty()) break;
  }
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == '*' || c == '"' || c == '`'; }),
             line.end());
  if (text::starts_with_ci(line, "label:")) line = line.substr(6);
  line = text::trim(line);
  while (!line.empty() && (line.back() == '.' || line.back() == ',')) line.pop_back();
  auto words = text::split(text::collapse_whitespace(line), ' ');
  if (words.size() > 6) words.resize(6);
  return text::join(words, " ");
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, Rng& rng, int n_init, int max_iterations) {
  if (k < 1 || points.size() < static_cast<std::size_t>(k))
    throw Error(ErrorCode::kPrecondition, "kmeans requires 1 <= k <= number of points");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, n_init); ++run) {
    KMeansResult r = kmeans_once(points, k, rng, max_iterations);
    if (r.inertia < best.inertia - 1e-12) best = std::move(r);
  }
  return best;
}

double silhouette_score(const std::vector<std::vector<double>>& points, const std::vector<int>& labels) {
  const std::size_t n = points.size();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);
  if (members.size() < 2) return -1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& own = members[labels[i]];
    if (own.size() == 1) continue;
    double a = 0.0;
    for (std::size_t j : own)
      if (j != i) a += std::sqrt(sq_dist(points[i], points[j]));
    a /= static_cast<double>(own.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, idx] : members) {
      if (label == labels[i]) continue;
      double s = 0.0;
      for (std::size_t j : idx) s += std::sqrt(sq_dist(points[i], points[j]));
      b = std::min(b, s / static_cast<double>(idx.size()));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

std::string tf_label(const std::vector<std::string>& statements, std::string_view exclude) {
  std::set<std::string> skip;
  for (const auto& t : text::content_terms(exclude)) skip.insert(t);
  std::map<std::string, int> tf;
  for (const auto& s : statements)
    for (const auto& t : text::content_terms(s))
      if (!skip.count(t) && t.size() > 2 && !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
        ++tf[t];
  std::vector<std::pair<std::string, int>> ranked(tf.begin(), tf.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  for (std::size_t i = 0; i < ranked.size() && words.size() < 2; ++i) {
    std::string w = ranked[i].first;
    if (!w.empty() && static_cast<unsigned char>(w[0]) < 0x80) w[0] = static_cast<char>(std::toupper(w[0]));
    words.push_back(w);
  }
  return words.empty() ? "General" : text::join(words, " ");
}

std::vector<ClusterAssignment> cluster_dimension(const std::vector<KnowledgeInstance>& instances, Embedder& embed,
                                                 ChatProvider& chat, std::string_view culture,
                                                 std::string_view dimension_name, const KPolicy& policy) {
  if (instances.empty()) return {};
  const std::string dimension_id = instances.front().dimension_id;
  for (const auto& k : instances)
    if (k.dimension_id != dimension_id)
      throw Error(ErrorCode::kPrecondition, "cluster_dimension received instances from several dimensions");

  std::vector<const KnowledgeInstance*> sorted;
  for (const auto& k : instances) sorted.push_back(&k);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->kb_id < b->kb_id; });
  const std::size_t n = sorted.size();

  std::vector<int> labels(n, 0);
  if (n >= 3) {
    std::vector<std::string> texts;
    for (auto* k : sorted) texts.push_back(k->statement);
    std::vector<std::vector<double>> points;
    try {
      points = embed.embed(texts);
    } catch (const Error& e) {
      throw Error(ErrorCode::kStage, "embedding failed for dimension " + dimension_id + ": " + e.what());
    }
    if (points.size() != n) throw Error(ErrorCode::kStage, "embedding count mismatch for dimension " + dimension_id);

    Rng rng(substream_seed(policy.seed, "cluster:" + dimension_id));
    if (policy.fixed_k > 0) {
      const int k = std::min<int>(policy.fixed_k, static_cast<int>(n));
      labels = canonical_labels(kmeans(points, k, rng, policy.n_init, policy.max_iterations).labels);
    } else {
      const int hi = std::min<int>(policy.max_k, static_cast<int>(n) - 1);
      double best_score = -std::numeric_limits<double>::infinity();
      for (int k = std::max(2, policy.min_k); k <= hi; ++k) {
        const auto result = kmeans(points, k, rng, policy.n_init, policy.max_iterations);
        const auto canon = canonical_labels(result.labels);
        const double score = silhouette_score(points, canon);
        if (score > best_score + 1e-12) {
          best_score = score;
          labels = canon;
        }
      }
      if (best_score <= -1.0) labels.assign(n, 0);
    }
  }

  const int clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::string> names(static_cast<std::size_t>(clusters));
  std::set<std::string> used;
  for (int c = 0; c < clusters; ++c) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] == c) members.push_back(sorted[i]->statement);
    std::string label;
    if (!chat.is_mock()) {
      ChatRequest req;
      req.user_text = prompts::cluster_label_prompt(culture, dimension_name, members);
      req.max_output_tokens = 32;
      req.task = LlmTask::kClusterLabel;
      label = clean_label(chat.chat(req).text);
    }
    if (label.empty()) label = tf_label(members, dimension_name);
    std::string unique = label;
    for (int suffix = 2; used.count(text::to_lower(unique)); ++suffix) unique = label + " " + std::to_string(suffix);
    used.insert(text::to_lower(unique));
    names[static_cast<std::size_t>(c)] = unique;
  }

  std::vector<ClusterAssignment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({sorted[i]->kb_id, dimension_id, labels[i], names[static_cast<std::size_t>(labels[i])]});
  return out;
}

std::vector<KeywordLabel> derive_keywords(const std::vector<ClusterAssignment>& assignments) {
  std::set<KeywordLabel> unique;
  for (const auto& a : assignments)
    if (!text::trim(a.cluster_label).empty()) unique.insert({a.dimension_id, a.cluster_label});
  return {unique.begin(), unique.end()};
}

void to_json(nlohmann::json& j, const KBStats& s) {
  j = nlohmann::json{{"per_dimension_counts", s.per_dimension_counts},
                     {"per_source_counts", s.per_source_counts},
                     {"total_instances", s.total_instances},
                     {"dimensions_covered", s.dimensions_covered}};
}

void from_json(const nlohmann::json& j, KBStats& s) {
  s.per_dimension_counts = j.at("per_dimension_counts").get<std::map<std::string, std::int64_t>>();
  s.per_source_counts = j.at("per_source_counts").get<std::map<std::string, std::int64_t>>();
  s.total_instances = j.at("total_instances").get<std::int64_t>();
  s.dimensions_covered = j.at("dimensions_covered").get<std::int64_t>();
}

KBStats kb_stats(const std::vector<KnowledgeInstance>& instances) {
  KBStats s;
  for (auto c : kAllSourceCategories) s.per_source_counts[std::string(to_string(c))] = 0;
  for (const auto& k : instances) {
    ++s.per_dimension_counts[k.dimension_id];
    ++s.per_source_counts[std::string(to_string(k.source_category))];
  }
  s.total_instances = static_cast<std::int64_t>(instances.size());
  s.dimensions_covered = static_cast<std::int64_t>(s.per_dimension_counts.size());
  return s;
}

}  // namespace culturescope
