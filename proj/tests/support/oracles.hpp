#pragma once

// Reference computations written independently of the library code paths
// they check. Keep them naive.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "culturescope/evaluation.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/reporting.hpp"
#include "culturescope/schema.hpp"

namespace cstest::oracle {

struct Tally {
  std::int64_t n = 0;
  std::int64_t correct = 0;
};

Tally count(const std::vector<culturescope::EvalRecord>& records);

// Groups by walking parent links by hand; returns group id -> tally.
std::map<std::string, Tally> group_counts(const std::vector<culturescope::EvalRecord>& records,
                                          const std::vector<culturescope::QuestionItem>& items,
                                          const culturescope::Schema& schema, culturescope::GroupKey key);

// Σ (n_g / N) * acc_g over the rows.
double recompose(const std::vector<culturescope::GroupRow>& rows);

// Number of connected components of the graph linking statements whose
// vectors have cosine >= threshold (or byte-equal text).
std::size_t similarity_components(const std::vector<std::string>& statements,
                                  const std::vector<std::vector<double>>& vectors, double threshold);

// Σ_cluster max_label count / N.
double purity(const std::vector<int>& clusters, const std::vector<std::string>& truth);

// True iff every input id appears in exactly one assignment.
bool is_partition(const std::vector<std::string>& ids, const std::vector<culturescope::ClusterAssignment>& got);

}  // namespace cstest::oracle
