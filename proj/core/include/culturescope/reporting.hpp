#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "culturescope/curation.hpp"
#include "culturescope/evaluation.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/schema.hpp"

namespace culturescope {

struct GroupedTable {
  std::string key;  // GroupKey name
  std::vector<GroupRow> rows;
  bool operator==(const GroupedTable&) const = default;
};

struct RunSummary {
  std::string config_digest;
  std::string model_id;
  std::string language;
  std::string dataset_digest;
  int injection_count = 0;
  std::int64_t n = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
  std::vector<GroupedTable> grouped;
};

RunSummary summarize_run(const EvalRun& run, const std::vector<QuestionItem>& items, const Schema& schema);

// Throws Error(kIntegrity) unless sum(n_g) == N and sum(n_g/N * acc_g)
// matches the overall accuracy within 1e-12 for every table.
void check_recomposition(const RunSummary& summary);

struct MainTableRow {
  std::string model_id;
  std::string language;
  double accuracy = 0.0;
  std::int64_t n = 0;
  std::vector<std::optional<double>> category_accuracy;  // report column order
  std::vector<std::int64_t> category_n;
};

struct MainTable {
  std::vector<std::string> columns;  // Lang, Acc, then category abbreviations
  std::vector<MainTableRow> rows;
  // Formatted cells for one row, aligned with `columns`.
  std::vector<std::string> cells(std::size_t row) const;
  std::string render_text() const;
};

std::string format_accuracy(double value);

// One row per (model, language); when several runs share the pair, the one
// with the smallest injection count is used. Mixed datasets are an integrity
// error.
MainTable render_main_table(const std::vector<EvalRun>& runs, const std::vector<QuestionItem>& items,
                            const Schema& schema);

struct CurveRow {
  int k = 0;
  std::int64_t n = 0;
  double accuracy = 0.0;
  bool operator==(const CurveRow&) const = default;
};

std::vector<CurveRow> render_injection_curve(const std::vector<EvalRun>& sweep);

struct DeltaRow {
  std::string baseline_digest;
  std::string other_digest;
  std::string key;
  std::string group;
  double delta = 0.0;
};

struct Report {
  std::optional<KBStats> kb_stats;
  std::vector<RunSummary> run_summaries;
  std::optional<MainTable> main_table;
  std::vector<CurveRow> injection_curve;
  std::vector<DeltaRow> comparisons;
  std::string created_at;
};

// Grouped deltas of every later run against the first run on the same dataset.
std::vector<DeltaRow> compare_runs(const std::vector<RunSummary>& summaries);

nlohmann::json report_to_json(const Report& report);

// Writes report.json and CSV tables into `dir`. Refuses (kIntegrity) when
// any grouped table fails recomposition; I/O problems raise kIo.
void export_report(const Report& report, const std::filesystem::path& dir);

struct GroupedCsvRow {
  std::string config_digest;
  std::string key;
  GroupRow row;
  bool operator==(const GroupedCsvRow&) const = default;
};

std::vector<GroupedCsvRow> read_grouped_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

}  // namespace culturescope
