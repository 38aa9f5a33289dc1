#include <algorithm>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "culturescope/acquisition.hpp"
#include "culturescope/curation.hpp"
#include "culturescope/digest.hpp"
#include "culturescope/error.hpp"
#include "culturescope/evaluation.hpp"
#include "culturescope/extraction.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/mock_llm.hpp"
#include "culturescope/parallel.hpp"
#include "culturescope/question_gen.hpp"
#include "culturescope/reporting.hpp"
#include "culturescope/schema.hpp"
#include "culturescope/text.hpp"

namespace culturescope::cli {

namespace {

using nlohmann::json;

class Logger {
 public:
  Logger(std::ostream& err, std::string command, bool quiet) : err_(err), command_(std::move(command)), quiet_(quiet) {}

  void info(const std::string& event, json fields = json::object()) { emit("info", event, std::move(fields)); }
  void warn(const std::string& event, json fields = json::object()) { emit("warn", event, std::move(fields)); }
  void error(const std::string& event, json fields) {
    fields["level"] = "error";
    fields["event"] = event;
    fields["command"] = command_;
    err_ << fields.dump() << "\n";
  }

 private:
  void emit(const char* level, const std::string& event, json fields) {
    if (quiet_) return;
    fields["level"] = level;
    fields["event"] = event;
    fields["command"] = command_;
    err_ << fields.dump() << "\n";
  }

  std::ostream& err_;
  std::string command_;
  bool quiet_;
};

struct Context {
  ToolkitConfig cfg;
  Logger& log;
  CallLog calls;
  SystemClock clock;
  std::shared_ptr<HttpTransport> transport;

  std::shared_ptr<HttpTransport> http() {
    if (!transport) transport = make_http_transport();
    return transport;
  }
};

std::string rel(const Context& ctx, const fs::path& p) {
  const fs::path r = fs::path(p).lexically_relative(ctx.cfg.root());
  if (r.empty() || *r.begin() == "..") return fs::absolute(p).lexically_normal().generic_string();
  return r.generic_string();
}

std::unique_ptr<ChatProvider> make_chat(Context& ctx, ProviderConfig pc, const std::string& default_id) {
  if (pc.is_mock()) return std::make_unique<MockChatProvider>(pc.model.empty() ? default_id : pc.model, &ctx.calls);
  auto limiter = std::make_shared<RateLimiter>(pc.requests_per_minute, ctx.clock);
  return std::make_unique<LiveChatProvider>(pc, ctx.http(), ctx.clock, &ctx.calls, limiter);
}

std::unique_ptr<Embedder> make_embedder(Context& ctx) {
  const ProviderConfig& pc = ctx.cfg.embed;
  if (pc.is_mock()) return std::make_unique<HashEmbedder>(256, pc.max_text_bytes, &ctx.calls);
  auto limiter = std::make_shared<RateLimiter>(pc.requests_per_minute, ctx.clock);
  return std::make_unique<LiveEmbedder>(pc, ctx.http(), ctx.clock, &ctx.calls, limiter);
}

void write_calls(const Context& ctx, const fs::path& path) {
  auto records = ctx.calls.records();
  std::sort(records.begin(), records.end(), [](const CallRecord& a, const CallRecord& b) {
    return std::tie(a.provider_id, a.operation, a.request_digest, a.outcome) <
           std::tie(b.provider_id, b.operation, b.request_digest, b.outcome);
  });
  std::vector<json> rows;
  for (const auto& r : records)
    rows.push_back({{"provider_id", r.provider_id},
                    {"operation", r.operation},
                    {"request_digest", r.request_digest},
                    {"latency_ms", r.latency_ms},
                    {"outcome", r.outcome}});
  write_jsonl(path, rows);
}

void write_stage_manifest(Context& ctx, const fs::path& dir, const std::string& stage, std::vector<fs::path> inputs,
                          std::vector<fs::path> outputs, json counts, const std::vector<std::string>& warnings,
                          std::uint64_t seed) {
  fs::create_directories(dir);
  const fs::path calls = dir / "calls.jsonl";
  write_calls(ctx, calls);
  outputs.push_back(calls);
  json in = json::array(), out = json::array();
  for (const auto& p : inputs) in.push_back(rel(ctx, p));
  for (const auto& p : outputs) out.push_back(rel(ctx, p));
  std::set<std::string> providers;
  for (const auto& r : ctx.calls.records()) providers.insert(r.provider_id);
  write_json_file(dir / "stage_manifest.json", json{{"stage", stage},
                                                    {"config_digest", toolkit_config_digest(ctx.cfg)},
                                                    {"seed", seed},
                                                    {"culture", ctx.cfg.culture},
                                                    {"language", ctx.cfg.language},
                                                    {"inputs", in},
                                                    {"outputs", out},
                                                    {"counts", counts},
                                                    {"providers", providers},
                                                    {"warnings", warnings}});
}

// ---------------------------------------------------------------------------
// build-kb

struct FilteredDoc {
  RawDocument doc;
  FilterVerdict verdict;
};

void stage_fetch(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Schema schema = load_schema(cfg.schema_path);
  PlanOptions plan_opts;
  plan_opts.include_sub_dimensions = cfg.include_sub_dimensions;
  plan_opts.query_template = cfg.query_template;
  std::vector<QuerySpec> specs = plan_retrieval(schema, cfg.culture, cfg.language, plan_opts);
  if (!cfg.dimensions.empty()) {
    const std::set<std::string> wanted(cfg.dimensions.begin(), cfg.dimensions.end());
    std::erase_if(specs, [&](const QuerySpec& s) { return !wanted.count(s.dimension_id); });
  }
  const std::vector<SeedUrl> seeds = cfg.seed_urls.empty() ? std::vector<SeedUrl>{} : load_seed_urls(cfg.seed_urls);
  const SourceClassifier classifier =
      cfg.source_rules.empty() ? SourceClassifier::defaults() : SourceClassifier::from_file(cfg.source_rules);

  std::unique_ptr<SearchProvider> search;
  if (cfg.search.is_mock()) {
    search = std::make_unique<MockSearchProvider>(MockSearchProvider::from_file(cfg.search.fixture_path, &ctx.calls));
  } else {
    auto limiter = std::make_shared<RateLimiter>(cfg.search.requests_per_minute, ctx.clock);
    search = std::make_unique<LiveSearchProvider>(cfg.search, ctx.http(), ctx.clock, &ctx.calls, limiter);
  }
  std::unique_ptr<Fetcher> fetcher;
  if (cfg.fetch.is_mock()) {
    fetcher = std::make_unique<FixtureFetcher>(FixtureFetcher::from_file(cfg.fetch.fixture_path, &ctx.calls));
  } else {
    fetcher = std::make_unique<LiveFetcher>(ctx.http(), ctx.clock, Millis{cfg.per_host_delay_ms}, &ctx.calls,
                                            cfg.fetch.timeout_seconds);
  }

  FetchOptions fopts;
  fopts.top_k = cfg.top_k;
  fopts.char_budget = cfg.char_budget;
  std::vector<RawDocument> docs;
  std::vector<std::string> warnings;
  for (const auto& spec : specs) {
    FetchOutcome got = fetch_documents(spec, search.get(), *fetcher, seeds, classifier, ctx.clock, fopts);
    for (auto& w : got.warnings) warnings.push_back(std::move(w));
    for (auto& d : got.documents) docs.push_back(std::move(d));
  }
  ctx.log.info("fetched", {{"queries", specs.size()}, {"documents", docs.size()}});

  auto chat = make_chat(ctx, cfg.chat, "mock-chat");
  const auto filtered = parallel_map(docs, static_cast<std::size_t>(cfg.workers), [&](const RawDocument& d) {
    return FilteredDoc{d, llm_filter(d, display_name(schema.at(d.dimension_id), cfg.language), *chat)};
  });

  std::vector<json> accepted, rejected;
  std::map<std::string, int> reasons;
  for (const auto& f : filtered) {
    ++reasons[f.verdict.reason];
    if (f.verdict.decision == FilterDecision::kAccepted) {
      accepted.push_back(f.doc);
    } else {
      json row = f.doc;
      row["filter_reason"] = f.verdict.reason;
      row["filter_rationale"] = f.verdict.rationale;
      rejected.push_back(row);
    }
  }
  const fs::path dir = cfg.stage_dir("docs");
  fs::create_directories(dir);
  write_jsonl(dir / "documents.jsonl", accepted);
  write_jsonl(dir / "filtered_out.jsonl", rejected);
  write_stage_manifest(ctx, dir, "fetch", {cfg.schema_path}, {dir / "documents.jsonl", dir / "filtered_out.jsonl"},
                       {{"queries", specs.size()},
                        {"fetched", docs.size()},
                        {"accepted", accepted.size()},
                        {"rejected", rejected.size()},
                        {"filter_reasons", reasons}},
                       warnings, cfg.seed);
  ctx.log.info("filtered", {{"accepted", accepted.size()}, {"rejected", rejected.size()}});
}

void stage_extract(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Schema schema = load_schema(cfg.schema_path);
  const fs::path docs_path = cfg.stage_dir("docs") / "documents.jsonl";
  if (!fs::exists(docs_path))
    throw Error(ErrorCode::kPrecondition, "no documents at " + docs_path.string() + "; run build-kb --stage fetch");
  const auto docs = read_records<RawDocument>(docs_path);
  auto chat = make_chat(ctx, cfg.chat, "mock-chat");

  struct Extracted {
    std::vector<KnowledgeInstance> instances;
    std::vector<std::string> warnings;
  };
  const auto per_doc = parallel_map(docs, static_cast<std::size_t>(cfg.workers), [&](const RawDocument& d) {
    const DimensionNode& node = schema.at(d.dimension_id);
    ExtractionResult ex = extract_knowledge(d, node, *chat);
    const std::string name = display_name(node, cfg.language);
    for (auto& inst : ex.instances) apply_verdict(inst, verify_instance(inst, d, name, *chat));
    return Extracted{std::move(ex.instances), std::move(ex.warnings)};
  });

  std::vector<KnowledgeInstance> kb;
  std::vector<std::string> warnings;
  for (const auto& e : per_doc) {
    kb.insert(kb.end(), e.instances.begin(), e.instances.end());
    warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
  }
  normalize_kb(kb);
  std::size_t capped = 0;
  if (cfg.max_instances_per_dimension > 0) {
    std::map<std::string, int> seen;
    std::vector<KnowledgeInstance> kept;
    for (auto& k : kb) {
      if (k.qc_status == QcStatus::kVerified && ++seen[k.dimension_id] > cfg.max_instances_per_dimension) {
        ++capped;
        continue;
      }
      kept.push_back(std::move(k));
    }
    kb = std::move(kept);
  }
  std::vector<KnowledgeInstance> verified;
  std::copy_if(kb.begin(), kb.end(), std::back_inserter(verified),
               [](const KnowledgeInstance& k) { return k.qc_status == QcStatus::kVerified; });

  const fs::path dir = cfg.stage_dir("kb");
  fs::create_directories(dir);
  write_records(dir / "kb.jsonl", kb);
  write_stage_manifest(ctx, dir, "extract", {docs_path}, {dir / "kb.jsonl"},
                       {{"documents", docs.size()},
                        {"instances", kb.size()},
                        {"verified", verified.size()},
                        {"rejected", kb.size() - verified.size()},
                        {"capped", capped},
                        {"stats", kb_stats(verified)}},
                       warnings, cfg.seed);
  ctx.log.info("extracted", {{"instances", kb.size()}, {"verified", verified.size()}});
}

int cmd_build_kb(Context& ctx, const std::string& stage) {
  if (stage == "fetch" || stage == "all") stage_fetch(ctx);
  if (stage == "extract" || stage == "all") stage_extract(ctx);
  return 0;
}

// ---------------------------------------------------------------------------
// curate

fs::path curated_kb_path(const ToolkitConfig& cfg) { return cfg.stage_dir("clusters") / "kb.jsonl"; }

int cmd_curate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Schema schema = load_schema(cfg.schema_path);
  const fs::path kb_path = cfg.stage_dir("kb") / "kb.jsonl";
  if (!fs::exists(kb_path)) throw Error(ErrorCode::kPrecondition, "no knowledge base at " + kb_path.string());
  const auto kb = read_records<KnowledgeInstance>(kb_path);
  std::vector<KnowledgeInstance> verified, others;
  for (const auto& k : kb) (k.qc_status == QcStatus::kVerified ? verified : others).push_back(k);

  auto embed = make_embedder(ctx);
  auto chat = make_chat(ctx, cfg.chat, "mock-chat");
  std::vector<KnowledgeInstance> kept = dedup(verified, cfg.dedup_threshold, *embed);

  std::map<std::string, std::vector<KnowledgeInstance>> by_dim;
  for (const auto& k : kept) by_dim[k.dimension_id].push_back(k);
  std::vector<ClusterAssignment> assignments;
  for (const auto& [dim, group] : by_dim) {
    KPolicy policy;
    policy.min_k = cfg.min_k;
    policy.max_k = cfg.max_k;
    policy.fixed_k = cfg.fixed_k;
    policy.seed = substream_seed(cfg.seed, "curate:" + dim);
    auto got = cluster_dimension(group, *embed, *chat, cfg.culture, display_name(schema.at(dim), cfg.language), policy);
    assignments.insert(assignments.end(), got.begin(), got.end());
  }
  std::map<std::string, std::string> label_of;
  for (const auto& a : assignments) label_of[a.kb_id] = a.cluster_label;
  for (auto& k : kept) {
    auto it = label_of.find(k.kb_id);
    if (it != label_of.end()) k.cluster_label = it->second;
  }
  std::vector<KnowledgeInstance> curated = kept;
  curated.insert(curated.end(), others.begin(), others.end());
  normalize_kb(curated);

  const Schema expanded = expand_schema(schema, derive_keywords(assignments), cfg.culture);
  const KBStats stats = kb_stats(kept);

  const fs::path dir = cfg.stage_dir("clusters");
  fs::create_directories(dir);
  write_records(dir / "kb.jsonl", curated);
  write_records(dir / "assignments.jsonl", assignments);
  save_schema(expanded, dir / "expanded_schema.json");
  write_json_file(dir / "stats.json", stats);
  write_stage_manifest(ctx, dir, "curate", {kb_path, cfg.schema_path},
                       {dir / "kb.jsonl", dir / "assignments.jsonl", dir / "expanded_schema.json", dir / "stats.json"},
                       {{"verified_in", verified.size()},
                        {"after_dedup", kept.size()},
                        {"merged", verified.size() - kept.size()},
                        {"dimensions_clustered", by_dim.size()},
                        {"sub_dimensions", expanded.counts().sub_dimensions}},
                       {}, cfg.seed);
  ctx.log.info("curated", {{"kept", kept.size()}, {"merged", verified.size() - kept.size()}});
  return 0;
}

// ---------------------------------------------------------------------------
// gen-dataset

int cmd_gen_dataset(Context& ctx, const std::string& plan_arg) {
  const auto& cfg = ctx.cfg;
  fs::path plan_path = plan_arg.empty() ? cfg.plan_path : fs::path(plan_arg);
  if (plan_path.empty()) throw Error(ErrorCode::kUsage, "gen-dataset needs --plan or generation.plan_path");
  if (!fs::exists(plan_path)) throw Error(ErrorCode::kUsage, "plan file not found: " + plan_path.string());
  json plan_doc = read_json_file(plan_path);
  if (!plan_doc.is_object()) throw Error(ErrorCode::kConfig, "plan must be a JSON object");
  if (!plan_doc.contains("culture")) plan_doc["culture"] = cfg.culture;
  if (!plan_doc.contains("language")) plan_doc["language"] = cfg.language;
  if (!plan_doc.contains("seed")) plan_doc["seed"] = substream_seed(cfg.seed, "gen-dataset");
  if (!plan_doc.contains("workers")) plan_doc["workers"] = cfg.workers;
  const GenerationPlan plan = plan_from_json(plan_doc);

  const fs::path kb_path = curated_kb_path(cfg);
  if (!fs::exists(kb_path)) throw Error(ErrorCode::kPrecondition, "no curated knowledge base; run curate first");
  const KnowledgeBase kb(read_records<KnowledgeInstance>(kb_path));
  const Schema schema = load_schema(cfg.schema_path);
  auto chat = make_chat(ctx, cfg.chat, "mock-chat");

  const Dataset ds = build_dataset(kb, schema, plan, *chat);
  const fs::path dir = cfg.stage_dir("datasets") / plan_path.stem();
  save_dataset(ds, dir);
  write_stage_manifest(ctx, dir, "gen-dataset", {kb_path, plan_path},
                       {dir / "manifest.json", dir / "items.jsonl", dir / "rejected.jsonl"},
                       {{"items", ds.items.size()},
                        {"rejected", ds.rejected.size()},
                        {"by_type", ds.manifest.counts_by_type},
                        {"dataset_digest", ds.manifest.dataset_digest}},
                       {}, plan.seed);
  ctx.log.info("dataset", {{"items", ds.items.size()}, {"digest", ds.manifest.dataset_digest}, {"dir", dir.string()}});
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string model;
  std::string dataset;
  std::string inject;
  std::string judge;
  bool allow_self_judge = false;
  int max_items = -1;
  fs::path kb;
};

std::vector<int> parse_ks(const std::string& s, const std::vector<int>& fallback) {
  if (s.empty()) return fallback;
  std::vector<int> ks;
  for (const auto& part : text::split(s, ',')) {
    const std::string t = text::trim(part);
    if (t.empty()) continue;
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || k < 0) throw Error(ErrorCode::kUsage, "--inject expects non-negative integers, got '" + t + "'");
    ks.push_back(k);
  }
  if (ks.empty()) throw Error(ErrorCode::kUsage, "--inject is empty");
  return ks;
}

int cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  const auto& cfg = ctx.cfg;
  const std::vector<int> ks = parse_ks(a.inject, cfg.injection_ks);
  const fs::path ds_path = fs::weakly_canonical(a.dataset);
  if (!fs::exists(ds_path)) throw Error(ErrorCode::kUsage, "dataset not found: " + a.dataset);
  const Dataset ds = load_dataset(ds_path);
  const fs::path kb_path = a.kb.empty() ? curated_kb_path(cfg) : a.kb;
  const KnowledgeBase kb(fs::exists(kb_path) ? read_records<KnowledgeInstance>(kb_path)
                                             : std::vector<KnowledgeInstance>{});
  const bool needs_kb = std::any_of(ks.begin(), ks.end(), [](int k) { return k > 0; });
  if (needs_kb && kb.instances().empty())
    throw Error(ErrorCode::kPrecondition, "knowledge injection needs a knowledge base; none at " + kb_path.string());

  ProviderConfig model_cfg = cfg.chat;
  model_cfg.model = a.model;
  ProviderConfig judge_cfg = cfg.judge;
  if (!a.judge.empty()) judge_cfg.model = a.judge;
  if (judge_cfg.model.empty()) judge_cfg.model = "mock-judge";
  auto model = make_chat(ctx, model_cfg, a.model);
  auto judge = make_chat(ctx, judge_cfg, judge_cfg.model);

  EvalRunConfig rc;
  rc.model_id = a.model;
  rc.dataset_ref = fs::is_directory(ds_path) ? ds_path.string() : ds_path.parent_path().string();
  rc.dataset_digest = ds.manifest.dataset_digest;
  rc.language = ds.manifest.language;
  rc.judge_model_id = judge_cfg.model;
  rc.seed = substream_seed(cfg.seed, "evaluate");
  if (a.max_items >= 0) rc.max_items = a.max_items;
  rc.max_output_tokens = cfg.max_output_tokens;
  rc.allow_self_judge = a.allow_self_judge;
  rc.workers = cfg.workers;
  rc.validate();

  const fs::path dir = cfg.stage_dir("runs") / slugify(a.model) / ds.manifest.dataset_digest;
  std::map<int, std::vector<PromptLogEntry>> prompts;
  const auto runs = injection_sweep(ds.items, kb, ks, *model, judge.get(), rc, dir, &prompts);

  std::vector<fs::path> outputs;
  json summary = json::array();
  for (const auto& run : runs) {
    const fs::path kdir = dir / ("k" + std::to_string(run.config.injection_count));
    save_run(run, kdir);
    std::vector<json> rows;
    for (const auto& e : prompts[run.config.injection_count]) rows.push_back(e);
    write_jsonl(kdir / "prompts.jsonl", rows);
    outputs.insert(outputs.end(), {kdir / "records.jsonl", kdir / "summary.json", kdir / "prompts.jsonl"});
    summary.push_back({{"k", run.config.injection_count}, {"n", run.n}, {"accuracy", run.accuracy}});
    ctx.log.info("run", {{"model", a.model}, {"k", run.config.injection_count}, {"n", run.n}, {"accuracy", run.accuracy}});
  }
  std::vector<fs::path> inputs{ds_path};
  if (fs::exists(kb_path)) inputs.push_back(kb_path);
  write_stage_manifest(ctx, dir, "evaluate", inputs, outputs, {{"runs", summary}, {"items", ds.items.size()}}, {},
                       rc.seed);
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(Context& ctx, const std::string& runs_arg, const std::string& out_arg) {
  const auto& cfg = ctx.cfg;
  const fs::path runs_dir = runs_arg.empty() ? cfg.stage_dir("runs") : fs::path(runs_arg);
  const fs::path out_dir = out_arg.empty() ? cfg.stage_dir("reports") : fs::path(out_arg);
  if (!fs::is_directory(runs_dir)) throw Error(ErrorCode::kUsage, "runs directory not found: " + runs_dir.string());
  const Schema schema = load_schema(cfg.schema_path);

  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::recursive_directory_iterator(runs_dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json") run_dirs.push_back(entry.path().parent_path());
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) throw Error(ErrorCode::kPrecondition, "no runs under " + runs_dir.string());

  std::vector<EvalRun> runs;
  std::map<std::string, Dataset> datasets;
  Report report;
  for (const auto& d : run_dirs) {
    EvalRun run = load_run(d);
    const std::string& digest = run.config.dataset_digest;
    if (!datasets.count(digest)) {
      Dataset ds = load_dataset(run.config.dataset_ref);
      if (ds.manifest.dataset_digest != digest)
        throw Error(ErrorCode::kIntegrity, "dataset at " + run.config.dataset_ref + " no longer matches run " + d.string());
      datasets.emplace(digest, std::move(ds));
    }
    report.run_summaries.push_back(summarize_run(run, datasets.at(digest).items, schema));
    runs.push_back(std::move(run));
  }

  if (datasets.size() == 1) {
    report.main_table = render_main_table(runs, datasets.begin()->second.items, schema);
  } else {
    ctx.log.warn("main_table_skipped", {{"reason", "runs span several datasets"}, {"datasets", datasets.size()}});
  }
  std::map<std::pair<std::string, std::string>, std::vector<EvalRun>> sweeps;
  for (const auto& r : runs) sweeps[{r.config.model_id, r.config.dataset_digest}].push_back(r);
  for (auto& [key, group] : sweeps) {
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(),
              [](const EvalRun& a, const EvalRun& b) { return a.config.injection_count < b.config.injection_count; });
    report.injection_curve = render_injection_curve(group);
    break;
  }
  report.comparisons = compare_runs(report.run_summaries);
  const fs::path kb_path = curated_kb_path(cfg);
  if (fs::exists(kb_path)) {
    std::vector<KnowledgeInstance> verified;
    for (auto& k : read_records<KnowledgeInstance>(kb_path))
      if (k.qc_status == QcStatus::kVerified) verified.push_back(std::move(k));
    report.kb_stats = kb_stats(verified);
  }
  report.created_at = ctx.clock.timestamp();
  export_report(report, out_dir);

  std::vector<fs::path> outputs;
  for (const char* f : {"grouped.csv", "runs.csv", "main_table.csv", "injection_curve.csv", "comparisons.csv",
                        "kb_dimensions.csv", "kb_sources.csv", "report.json"})
    outputs.push_back(out_dir / f);
  std::vector<fs::path> inputs;
  for (const auto& d : run_dirs) inputs.push_back(d / "summary.json");
  write_stage_manifest(ctx, out_dir, "report", inputs, outputs,
                       {{"runs", runs.size()}, {"datasets", datasets.size()}}, {}, cfg.seed);
  if (report.main_table) ctx.log.info("main_table", {{"text", report.main_table->render_text()}});
  ctx.log.info("report", {{"out", out_dir.string()}, {"runs", runs.size()}});
  return 0;
}

int exit_for(ErrorCode code) {
  return code == ErrorCode::kUsage || code == ErrorCode::kConfig ? 2 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"culturescope: cultural knowledge benchmark toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string workspace;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "toolkit config file")->required();
  app.add_option("-w,--workspace", workspace, "override workspace_dir");
  app.add_flag("-q,--quiet", quiet, "only log errors");

  std::string stage = "all";
  auto* build = app.add_subcommand("build-kb", "retrieve, filter, extract and verify knowledge");
  build->add_option("--stage", stage)->check(CLI::IsMember({"fetch", "extract", "all"}));
  auto* curate = app.add_subcommand("curate", "deduplicate, cluster and expand the schema");
  std::string plan;
  auto* gen = app.add_subcommand("gen-dataset", "generate and verify benchmark questions");
  gen->add_option("--plan", plan, "generation plan file");
  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score a model on a dataset");
  evaluate->add_option("--model", ev.model, "model id")->required();
  evaluate->add_option("--dataset", ev.dataset, "dataset directory or manifest")->required();
  evaluate->add_option("--inject", ev.inject, "comma separated injection counts");
  evaluate->add_option("--judge", ev.judge, "judge model id");
  evaluate->add_option("--kb", ev.kb, "knowledge base used for injection");
  evaluate->add_option("--max-items", ev.max_items, "evaluate a seeded subset")->check(CLI::NonNegativeNumber);
  evaluate->add_flag("--allow-self-judge", ev.allow_self_judge, "permit judge == model");
  std::string runs_dir, out_dir;
  auto* report = app.add_subcommand("report", "aggregate runs into tables");
  report->add_option("--runs", runs_dir, "directory holding run outputs");
  report->add_option("--out", out_dir, "output directory");
  auto* check = app.add_subcommand("validate-config", "check the config without running anything");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"level", "error"}, {"event", "usage"}, {"code", "Usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  Logger log(err, command, quiet);

  try {
    ConfigCheck checked = validate_config(config_path);
    if (!checked.ok()) {
      for (const auto& v : checked.violations)
        log.error("config_violation", {{"code", "Config"}, {"field", v.field}, {"message", v.message}});
      return 2;
    }
    Context ctx{std::move(*checked.config), log, {}, {}, nullptr};
    if (!workspace.empty()) ctx.cfg.workspace_dir = fs::absolute(workspace);

    if (check->parsed()) {
      out << json{{"valid", true}, {"config_digest", toolkit_config_digest(ctx.cfg)}}.dump() << "\n";
      return 0;
    }
    if (build->parsed()) return cmd_build_kb(ctx, stage);
    if (curate->parsed()) return cmd_curate(ctx);
    if (gen->parsed()) return cmd_gen_dataset(ctx, plan);
    if (evaluate->parsed()) return cmd_evaluate(ctx, ev);
    if (report->parsed()) return cmd_report(ctx, runs_dir, out_dir);
  } catch (const Error& e) {
    log.error("failed", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}});
    return exit_for(e.code());
  } catch (const std::exception& e) {
    log.error("failed", {{"code", "Internal"}, {"message", e.what()}});
    return 1;
  }
  return 2;
}

}  // namespace culturescope::cli
