#include "culturescope/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "culturescope/jsonl.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

namespace {

std::string exact_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json rows_json(const std::vector<GroupRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"group", r.group}, {"label", r.label}, {"n", r.n}, {"correct", r.correct}, {"accuracy", r.accuracy}});
  return arr;
}

}  // namespace

RunSummary summarize_run(const EvalRun& run, const std::vector<QuestionItem>& items, const Schema& schema) {
  RunSummary s;
  s.config_digest = config_digest(run.config);
  s.model_id = run.config.model_id;
  s.language = run.config.language;
  s.dataset_digest = run.config.dataset_digest;
  s.injection_count = run.config.injection_count;
  s.n = run.n;
  for (const auto& r : run.records) s.correct += r.correct ? 1 : 0;
  s.accuracy = run.records.empty() ? 0.0 : accuracy(run.records);
  for (auto key : kAllGroupKeys)
    s.grouped.push_back({std::string(to_string(key)), group_accuracy(run.records, items, schema, key)});
  check_recomposition(s);
  return s;
}

void check_recomposition(const RunSummary& summary) {
  for (const auto& table : summary.grouped) {
    std::int64_t n = 0;
    double recomposed = 0.0;
    for (const auto& r : table.rows) {
      n += r.n;
      recomposed += static_cast<double>(r.n) / static_cast<double>(summary.n) * r.accuracy;
    }
    if (summary.n == 0 && table.rows.empty()) continue;
    if (n != summary.n || std::fabs(recomposed - summary.accuracy) > 1e-12)
      throw Error(ErrorCode::kIntegrity, "grouped table '" + table.key + "' of run " + summary.config_digest +
                                             " does not recompose to the overall accuracy");
  }
}

std::string format_accuracy(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

std::vector<std::string> MainTable::cells(std::size_t row) const {
  const auto& r = rows.at(row);
  std::vector<std::string> out = {r.language, format_accuracy(r.accuracy)};
  for (const auto& c : r.category_accuracy) out.push_back(c ? format_accuracy(*c) : "-");
  return out;
}

std::string MainTable::render_text() const {
  std::string out = "| Model | " + text::join(columns, " | ") + " |\n";
  out += "|---";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "|---";
  out += "|\n";
  for (std::size_t i = 0; i < rows.size(); ++i) out += "| " + rows[i].model_id + " | " + text::join(cells(i), " | ") + " |\n";
  return out;
}

MainTable render_main_table(const std::vector<EvalRun>& runs, const std::vector<QuestionItem>& items,
                            const Schema& schema) {
  MainTable table;
  const auto categories = schema.report_categories();
  table.columns = {"Lang", "Acc"};
  for (const auto* c : categories) table.columns.push_back(c->abbrev.empty() ? c->name : c->abbrev);
  if (runs.empty()) return table;

  std::set<std::string> digests;
  for (const auto& r : runs) digests.insert(r.config.dataset_digest);
  if (digests.size() > 1) throw Error(ErrorCode::kIntegrity, "main table runs come from different dataset manifests");

  std::map<std::pair<std::string, std::string>, const EvalRun*> chosen;
  for (const auto& r : runs) {
    auto& slot = chosen[{r.config.model_id, r.config.language}];
    if (!slot || r.config.injection_count < slot->config.injection_count) slot = &r;
  }
  for (const auto& [key, run] : chosen) {
    MainTableRow row;
    row.model_id = key.first;
    row.language = key.second;
    row.n = run->n;
    row.accuracy = run->records.empty() ? 0.0 : accuracy(run->records);
    const auto grouped = group_accuracy(run->records, items, schema, GroupKey::kCategory);
    for (const auto* c : categories) {
      auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.group == c->node_id; });
      if (it == grouped.end()) {
        row.category_accuracy.push_back(std::nullopt);
        row.category_n.push_back(0);
      } else {
        row.category_accuracy.push_back(it->accuracy);
        row.category_n.push_back(it->n);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<CurveRow> render_injection_curve(const std::vector<EvalRun>& sweep) {
  std::vector<CurveRow> rows;
  std::set<int> ks;
  std::set<std::pair<std::string, std::string>> identity;
  for (const auto& r : sweep) {
    if (!ks.insert(r.config.injection_count).second)
      throw Error(ErrorCode::kIntegrity, "duplicate injection count " + std::to_string(r.config.injection_count));
    identity.insert({r.config.model_id, r.config.dataset_digest});
    rows.push_back({r.config.injection_count, r.n, r.records.empty() ? 0.0 : accuracy(r.records)});
  }
  if (identity.size() > 1) throw Error(ErrorCode::kIntegrity, "injection curve mixes models or datasets");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  return rows;
}

std::vector<DeltaRow> compare_runs(const std::vector<RunSummary>& summaries) {
  std::vector<DeltaRow> out;
  std::map<std::string, const RunSummary*> baseline;
  for (const auto& s : summaries) {
    auto [it, inserted] = baseline.emplace(s.dataset_digest, &s);
    if (inserted) continue;
    const RunSummary& base = *it->second;
    out.push_back({base.config_digest, s.config_digest, "overall", "all", s.accuracy - base.accuracy});
    for (const auto& table : s.grouped) {
      const auto bt = std::find_if(base.grouped.begin(), base.grouped.end(), [&](auto& t) { return t.key == table.key; });
      if (bt == base.grouped.end()) continue;
      for (const auto& row : table.rows) {
        const auto br = std::find_if(bt->rows.begin(), bt->rows.end(), [&](auto& r) { return r.group == row.group; });
        if (br != bt->rows.end())
          out.push_back({base.config_digest, s.config_digest, table.key, row.group, row.accuracy - br->accuracy});
      }
    }
  }
  return out;
}

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json j;
  j["created_at"] = report.created_at;
  j["kb_stats"] = report.kb_stats ? nlohmann::json(*report.kb_stats) : nlohmann::json(nullptr);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& s : report.run_summaries) {
    nlohmann::json grouped = nlohmann::json::object();
    for (const auto& t : s.grouped) grouped[t.key] = rows_json(t.rows);
    runs.push_back({{"config_digest", s.config_digest},
                    {"model_id", s.model_id},
                    {"language", s.language},
                    {"dataset_digest", s.dataset_digest},
                    {"injection_count", s.injection_count},
                    {"n", s.n},
                    {"correct", s.correct},
                    {"accuracy", s.accuracy},
                    {"grouped", grouped}});
  }
  j["run_summaries"] = runs;
  if (report.main_table) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < report.main_table->rows.size(); ++i)
      rows.push_back({{"model_id", report.main_table->rows[i].model_id}, {"cells", report.main_table->cells(i)}});
    j["main_table"] = {{"columns", report.main_table->columns}, {"rows", rows}};
  } else {
    j["main_table"] = nullptr;
  }
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& c : report.injection_curve) curve.push_back({{"k", c.k}, {"n", c.n}, {"accuracy", c.accuracy}});
  j["injection_curve"] = curve;
  nlohmann::json deltas = nlohmann::json::array();
  for (const auto& d : report.comparisons)
    deltas.push_back({{"baseline", d.baseline_digest}, {"other", d.other_digest}, {"key", d.key}, {"group", d.group},
                      {"delta", d.delta}});
  j["comparisons"] = deltas;
  return j;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_line(const std::vector<std::string>& fields) {
  std::vector<std::string> escaped;
  for (const auto& f : fields) escaped.push_back(csv_escape(f));
  return text::join(escaped, ",") + "\n";
}

void write_out(const std::filesystem::path& path, const std::string& content) {
  try {
    write_text_file(path, content);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string() + ": " + e.what());
  }
}

}  // namespace

void export_report(const Report& report, const std::filesystem::path& dir) {
  for (const auto& s : report.run_summaries) check_recomposition(s);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::string grouped = csv_line({"config_digest", "model_id", "language", "injection_count", "key", "group", "label",
                                  "n", "correct", "accuracy"});
  for (const auto& s : report.run_summaries)
    for (const auto& t : s.grouped)
      for (const auto& r : t.rows)
        grouped += csv_line({s.config_digest, s.model_id, s.language, std::to_string(s.injection_count), t.key, r.group,
                             r.label, std::to_string(r.n), std::to_string(r.correct), exact_number(r.accuracy)});
  write_out(dir / "grouped.csv", grouped);

  std::string runs = csv_line({"config_digest", "model_id", "language", "injection_count", "n", "correct", "accuracy"});
  for (const auto& s : report.run_summaries)
    runs += csv_line({s.config_digest, s.model_id, s.language, std::to_string(s.injection_count), std::to_string(s.n),
                      std::to_string(s.correct), exact_number(s.accuracy)});
  write_out(dir / "runs.csv", runs);

  std::vector<std::string> main_header = {"model_id"};
  if (report.main_table)
    main_header.insert(main_header.end(), report.main_table->columns.begin(), report.main_table->columns.end());
  std::string main = csv_line(main_header);
  if (report.main_table)
    for (std::size_t i = 0; i < report.main_table->rows.size(); ++i) {
      std::vector<std::string> cells = {report.main_table->rows[i].model_id};
      const auto c = report.main_table->cells(i);
      cells.insert(cells.end(), c.begin(), c.end());
      main += csv_line(cells);
    }
  write_out(dir / "main_table.csv", main);

  std::string curve = csv_line({"k", "n", "accuracy"});
  for (const auto& c : report.injection_curve)
    curve += csv_line({std::to_string(c.k), std::to_string(c.n), exact_number(c.accuracy)});
  write_out(dir / "injection_curve.csv", curve);

  std::string deltas = csv_line({"baseline", "other", "key", "group", "delta"});
  for (const auto& d : report.comparisons)
    deltas += csv_line({d.baseline_digest, d.other_digest, d.key, d.group, exact_number(d.delta)});
  write_out(dir / "comparisons.csv", deltas);

  std::string dims = csv_line({"dimension_id", "count"});
  std::string sources = csv_line({"source_category", "count"});
  if (report.kb_stats) {
    for (const auto& [d, n] : report.kb_stats->per_dimension_counts) dims += csv_line({d, std::to_string(n)});
    for (const auto& [c, n] : report.kb_stats->per_source_counts) sources += csv_line({c, std::to_string(n)});
  }
  write_out(dir / "kb_dimensions.csv", dims);
  write_out(dir / "kb_sources.csv", sources);

  write_out(dir / "report.json", report_to_json(report).dump(2) + "\n");
}

std::vector<GroupedCsvRow> read_grouped_csv(const std::filesystem::path& path) {
  const auto rows = parse_csv(read_text_file(path));
  if (rows.empty()) throw Error(ErrorCode::kParse, path.string() + ": missing header row");
  const auto& header = rows.front();
  auto col = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::kParse, path.string() + ": missing column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_digest = col("config_digest"), c_key = col("key"), c_group = col("group"), c_label = col("label"),
             c_n = col("n"), c_correct = col("correct"), c_acc = col("accuracy");
  std::vector<GroupedCsvRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != header.size())
      throw Error(ErrorCode::kParse, path.string() + ": row " + std::to_string(i + 1) + " has the wrong field count");
    GroupedCsvRow g;
    g.config_digest = r[c_digest];
    g.key = r[c_key];
    g.row.group = r[c_group];
    g.row.label = r[c_label];
    g.row.n = std::stoll(r[c_n]);
    g.row.correct = std::stoll(r[c_correct]);
    g.row.accuracy = std::stod(r[c_acc]);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace culturescope
