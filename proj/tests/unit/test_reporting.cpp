#include <gtest/gtest.h>

#include "culturescope/error.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/reporting.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace culturescope;
namespace fs = std::filesystem;

namespace {

EvalRun make_run(const std::string& model, const std::vector<EvalRecord>& recs, int k = 0) {
  EvalRun run;
  run.config.model_id = model;
  run.config.language = "en";
  run.config.dataset_digest = "fixture";
  run.config.dataset_ref = "fixture";
  run.config.judge_model_id = "judge";
  run.config.injection_count = k;
  run.records = recs;
  run.n = static_cast<std::int64_t>(recs.size());
  run.accuracy = accuracy(recs);
  return run;
}

struct Small {
  std::vector<QuestionItem> items;
  std::vector<EvalRecord> recs;
};

Small small_fixture(int shift = 0) {
  Small s;
  const std::vector<std::string> dims = {"dimension.celebration_of_festivals", "dimension.alcohol",
                                         "dimension.vehicle_movement_rules", "dimension.male_dominance", "dimension.power_distance"};
  int i = 0;
  for (const auto& d : dims) {
    for (int j = 0; j < 4; ++j, ++i) {
      s.items.push_back(cstest::make_item("it" + std::to_string(i), d, kAllContentTypes[j], FormatType::kTrueFalse));
      EvalRecord r;
      r.item_id = s.items.back().item_id;
      r.correct = (i + shift) % 3 != 0;
      s.recs.push_back(r);
    }
  }
  return s;
}

}  // namespace

TEST(Reporting, MainTableFixtureRowRendersExactly) {
  const auto fx = cstest::load_main_table_fixture();
  const auto run = make_run(fx.model, fx.records);
  const auto table = render_main_table({run}, fx.items, cstest::canonical_schema());
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.cells(0), fx.expected_cells);
  EXPECT_EQ(table.rows[0].n, 560);
}

TEST(Reporting, TwoModelsSevenColumns) {
  const auto s = small_fixture();
  const auto t = small_fixture(1);
  const auto table = render_main_table({make_run("m1", s.recs), make_run("m2", t.recs)}, s.items,
                                       cstest::canonical_schema());
  EXPECT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.columns.size(), 7u);
  EXPECT_EQ(table.columns[0], "Lang");
  EXPECT_EQ(table.columns[1], "Acc");
  EXPECT_EQ(table.cells(0).size(), 7u);
}

TEST(Reporting, SingleRunAccMatches) {
  const auto s = small_fixture();
  const auto run = make_run("m1", s.recs);
  const auto table = render_main_table({run}, s.items, cstest::canonical_schema());
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.rows[0].accuracy, run.accuracy);
  EXPECT_EQ(table.cells(0)[1], format_accuracy(run.accuracy));
}

TEST(Reporting, MixedDatasetsRejected) {
  const auto s = small_fixture();
  auto a = make_run("m1", s.recs);
  auto b = make_run("m2", s.recs);
  b.config.dataset_digest = "other";
  EXPECT_THROW(render_main_table({a, b}, s.items, cstest::canonical_schema()), Error);
}

TEST(Reporting, InjectionCurveRows) {
  const auto s = small_fixture();
  std::vector<EvalRun> sweep;
  for (int k = 0; k < 4; ++k) sweep.push_back(make_run("m", s.recs, k));
  const auto curve = render_injection_curve(sweep);
  ASSERT_EQ(curve.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(curve[k].k, k);
  EXPECT_EQ(render_injection_curve({sweep[0]}).size(), 1u);
  EXPECT_THROW(render_injection_curve({sweep[1], sweep[1]}), Error);
}

TEST(Reporting, SummaryRecomposesForEveryKey) {
  const auto s = small_fixture();
  const auto summary = summarize_run(make_run("m", s.recs), s.items, cstest::canonical_schema());
  EXPECT_EQ(summary.grouped.size(), std::size(kAllGroupKeys));
  for (const auto& g : summary.grouped) EXPECT_NEAR(cstest::oracle::recompose(g.rows), summary.accuracy, 1e-12) << g.key;
}

TEST(Reporting, EmptyReportWritesHeaders) {
  cstest::TempDir tmp;
  export_report(Report{}, tmp.path());
  for (const char* f : {"grouped.csv", "runs.csv", "main_table.csv", "injection_curve.csv", "comparisons.csv"}) {
    const auto rows = parse_csv(read_text_file(tmp.path() / f));
    ASSERT_EQ(rows.size(), 1u) << f;
    EXPECT_FALSE(rows[0].empty());
  }
}

TEST(Reporting, ExportIsByteStable) {
  const auto s = small_fixture();
  Report r;
  r.run_summaries.push_back(summarize_run(make_run("m", s.recs), s.items, cstest::canonical_schema()));
  r.main_table = render_main_table({make_run("m", s.recs)}, s.items, cstest::canonical_schema());
  r.created_at = "2024-01-01T00:00:00Z";
  cstest::TempDir a, b;
  export_report(r, a.path());
  export_report(r, b.path());
  for (const auto& entry : fs::directory_iterator(a.path()))
    EXPECT_EQ(read_text_file(entry.path()), read_text_file(b.path() / entry.path().filename())) << entry.path();
}

TEST(Reporting, GroupedCsvRoundTrip) {
  const auto s = small_fixture();
  Report r;
  const auto summary = summarize_run(make_run("m", s.recs), s.items, cstest::canonical_schema());
  r.run_summaries.push_back(summary);
  cstest::TempDir tmp;
  export_report(r, tmp.path());
  const auto back = read_grouped_csv(tmp.path() / "grouped.csv");
  std::size_t i = 0;
  for (const auto& g : summary.grouped) {
    for (const auto& row : g.rows) {
      ASSERT_LT(i, back.size());
      EXPECT_EQ(back[i].key, g.key);
      EXPECT_EQ(back[i].row, row);
      ++i;
    }
  }
  EXPECT_EQ(i, back.size());
}

TEST(Reporting, CsvEscaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  const auto rows = parse_csv("x,\"a,b\",\"q\"\"q\"\n1,2,3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][1], "a,b");
  EXPECT_EQ(rows[0][2], "q\"q");
}

TEST(Reporting, FormatAccuracyRounding) {
  EXPECT_EQ(format_accuracy(0.875), "0.875");
  EXPECT_EQ(format_accuracy(240.0 / 276.0), "0.870");
  EXPECT_EQ(format_accuracy(45.0 / 48.0), "0.938");
  EXPECT_EQ(format_accuracy(70.0 / 76.0), "0.921");
}

TEST(Reporting, CompareRunsDeltas) {
  const auto s = small_fixture();
  const auto t = small_fixture(1);
  const auto a = summarize_run(make_run("m1", s.recs), s.items, cstest::canonical_schema());
  const auto b = summarize_run(make_run("m2", t.recs), s.items, cstest::canonical_schema());
  const auto deltas = compare_runs({a, b});
  ASSERT_FALSE(deltas.empty());
  bool found_language = false;
  for (const auto& d : deltas)
    if (d.key == "language") {
      found_language = true;
      EXPECT_NEAR(d.delta, b.accuracy - a.accuracy, 1e-15);
    }
  EXPECT_TRUE(found_language);
}
