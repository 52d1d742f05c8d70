#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/app/config.hpp"
#include "apidomain/app/experiment.hpp"
#include "apidomain/app/prediction.hpp"
#include "apidomain/app/workspace.hpp"
#include "apidomain/codeparse/snapshot.hpp"
#include "apidomain/common/jsonl.hpp"
#include "apidomain/corpus/dataset.hpp"
#include "apidomain/eval/report.hpp"
#include "apidomain/eval/stats.hpp"
#include "apidomain/ingestion/csv.hpp"
#include "apidomain/ingestion/github.hpp"
#include "apidomain/ingestion/linking.hpp"
#include "apidomain/taxonomy/review.hpp"
#include "apidomain/taxonomy/vectors.hpp"

// Subcommand bodies. Each takes parsed options and writes a short human
// summary to `out`; failures surface as apidomain::Error subclasses.
namespace apidomain::cli {

struct Context {
  ExperimentConfig cfg;
  unsigned jobs = 1;
  std::ostream* out = &std::cout;
  std::function<std::unique_ptr<Tracker>(const ProjectConfig&, const std::string& token)> tracker_factory;

  std::ostream& os() const { return *out; }

  std::string token() const {
    const char* v = std::getenv(cfg.token_env.c_str());
    return v ? std::string(v) : std::string();
  }

  std::unique_ptr<Tracker> tracker(const ProjectConfig& p) const {
    if (p.tracker != TrackerKind::github)
      throw UserError("project '" + p.name + "' is not backed by a live tracker");
    if (tracker_factory) return tracker_factory(p, token());
    auto coords = GitHubCoordinates::from_slug(p.repo, p.name);
    coords.api_base = p.api_base;
    coords.page_size = p.page_size;
    return std::make_unique<GitHubTracker>(std::move(coords), token());
  }

  /// Projects named on the command line, or all of them.
  std::vector<const ProjectConfig*> selected(const std::vector<std::string>& names) const {
    std::vector<const ProjectConfig*> out;
    if (names.empty()) {
      for (const auto& p : cfg.projects) out.push_back(&p);
    } else {
      for (const auto& n : names) out.push_back(&cfg.project(n));
    }
    return out;
  }
};

inline std::set<std::string> project_extensions(const ProjectConfig& p) {
  if (!p.extensions.empty()) return p.extensions;
  auto e = source_extensions_for(p.language);
  if (e.empty()) throw UnsupportedLanguageError("no source extensions known for language '" + p.language + "'");
  return e;
}

// --- mine ------------------------------------------------------------------

struct MineOptions {
  std::vector<std::string> projects;
  std::optional<std::string> since;
};

inline void mine(const Context& ctx, const MineOptions& o) {
  for (const auto* p : ctx.selected(o.projects)) {
    const auto dir = ctx.cfg.project_dir(p->name);
    std::vector<Issue> issues;
    std::vector<ChangeSet> changes;
    std::vector<IssueChangeLink> links;
    std::vector<CsvReject> rejects;
    if (p->tracker == TrackerKind::github) {
      auto t = ctx.tracker(*p);
      issues = t->fetch_issues(IssueState::closed, o.since);
      changes = t->fetch_changes();
      links = link_by_reference(issues, changes);
    } else {
      const auto schema = p->csv_schema.empty() ? CsvSchema::canonical() : CsvSchema::load(p->csv_schema);
      auto imp = import_csv(p->csv, schema, p->name);
      for (auto& i : imp.issues)
        if (i.state == IssueState::closed) issues.push_back(std::move(i));
      for (auto& c : imp.changes)
        if (c.merged) changes.push_back(std::move(c));
      links = resolve_links(imp.links, issues, changes);
      rejects = std::move(imp.rejects);
    }
    for (auto& c : changes) c.changed_file_paths = dedup_paths(c.changed_file_paths);
    const auto filtered = filter_linked(links, changes, project_extensions(*p));
    write_jsonl(dir / files::issues, issues);
    write_jsonl(dir / files::changes, changes);
    write_jsonl(dir / files::mined_links, filtered.kept);
    write_jsonl(dir / files::rejects, rejects);
    ctx.os() << fmt::format("{}: {} issues, {} merged changes, {} links ({} without source changes dropped), {} rejects\n",
                            p->name, issues.size(), changes.size(), filtered.kept.size(), filtered.discarded,
                            rejects.size());
  }
}

// --- parse -----------------------------------------------------------------

inline void parse(const Context& ctx, const std::vector<std::string>& projects) {
  for (const auto* p : ctx.selected(projects)) {
    if (p->source.empty()) throw ConfigError("[project:" + p->name + "] source checkout path is required for parse");
    const auto dir = ctx.cfg.project_dir(p->name);
    const auto build = build_snapshot(p->source, parse_language(p->language));
    write_json(dir / files::snapshot, build.index);
    text::write_file(dir / files::inventory, inventory_csv(build.file_apis));
    const auto changes = read_jsonl<ChangeSet>(require_file(dir / files::changes, "mine"));
    const auto mined = read_jsonl<IssueChangeLink>(require_file(dir / files::mined_links, "mine"));
    const auto live = snapshot_filter(mined, changes, build.index);
    write_jsonl(dir / files::links, live);
    if (build.unreadable) spdlog::warn("{}: {} source files could not be read", p->name, build.unreadable);
    ctx.os() << fmt::format("{}: {} source files, {} distinct APIs, {} of {} links touch live files\n", p->name,
                            build.index.file_paths.size(), build.index.api_namespaces.size(), live.size(),
                            mined.size());
  }
}

// --- classify-apis ---------------------------------------------------------

struct ClassifyOptions {
  std::vector<std::string> projects;
  std::filesystem::path decisions;  // overrides [taxonomy] decisions
  bool interactive = false;
};

inline void classify_apis(const Context& ctx, const ClassifyOptions& o, std::istream& in = std::cin) {
  std::set<std::string> namespaces;
  for (const auto* p : ctx.selected(o.projects)) {
    const auto idx = read_json(require_file(ctx.cfg.project_dir(p->name) / files::snapshot, "parse")).get<SnapshotIndex>();
    namespaces.insert(idx.api_namespaces.begin(), idx.api_namespaces.end());
  }
  const auto blocklist = configured_blocklist(ctx.cfg);
  std::optional<WordVectorStore> store;
  std::optional<DomainEmbeddings> emb;
  if (!ctx.cfg.taxonomy.vectors.empty()) {
    store = WordVectorStore::load(ctx.cfg.taxonomy.vectors);
    emb.emplace(*store);
  } else {
    spdlog::warn("no [taxonomy] vectors configured; reviewing without suggestions");
  }
  auto records = build_token_records(namespaces, blocklist, emb ? &*emb : nullptr, ctx.cfg.taxonomy.suggestions, ctx.jobs);

  const auto map_path = ctx.cfg.domain_map_path();
  auto map = DomainMap::load(map_path);
  const auto decisions = o.decisions.empty() ? ctx.cfg.taxonomy.decisions : o.decisions;
  std::unique_ptr<ReviewSource> source;
  if (!o.interactive && !decisions.empty()) {
    source = std::make_unique<ScriptedReview>(ScriptedReview::load(decisions));  // validated before any mutation
  } else {
    source = std::make_unique<InteractiveReview>(in, ctx.os());
  }
  // keep the log file present even when nothing new is decided
  if (!std::filesystem::exists(map_path)) map.save(map_path);
  const auto outcome =
      review_session(std::move(records), map, *source, blocklist, [&](const DomainMapEntry& e) { append_decision(map_path, e); });
  outcome.map.save(map_path);

  std::size_t unresolved = 0;
  for (const auto& ns : namespaces)
    if (!classify_namespace(ns, outcome.map, blocklist)) ++unresolved;
  ctx.os() << fmt::format("{} namespaces; {} decisions recorded, {} skipped; {} namespaces still unresolved{}\n",
                          namespaces.size(), outcome.decided, outcome.skipped, unresolved,
                          outcome.quit ? " (session stopped early; rerun to resume)" : "");
}

// --- build-dataset -----------------------------------------------------------

struct BuildOptions {
  std::vector<std::string> projects;
};

inline std::filesystem::path dataset_dir(const ExperimentConfig& cfg, const std::string& project) {
  return cfg.project_dir(project) / files::dataset;
}

inline void build_dataset(const Context& ctx, const BuildOptions& o) {
  const auto map = load_domain_map(ctx.cfg);
  for (const auto* p : ctx.selected(o.projects)) {
    const auto corpus = assemble_corpus(ctx.cfg, p->name, map);
    if (corpus.rows() == 0) throw DatasetTooSmallError("project '" + p->name + "' has no labeled issues");
    std::vector<std::string> docs;
    for (const auto& d : corpus.docs) docs.push_back(d.text);
    const auto tfidf = TfidfModel::fit(docs, ctx.cfg.ngram, {p->name});
    MultiLabelDataset ds;
    ds.features = tfidf.transform(docs, ctx.jobs);
    ds.labels = corpus.labels;
    ds.label_names = corpus.label_names;
    ds.row_ids = corpus.row_ids();
    const auto diag = diagnostics(ds.labels);
    const auto dir = dataset_dir(ctx.cfg, p->name);
    nlohmann::json prov = {{"project", p->name},
                           {"config_hash", ctx.cfg.hash()},
                           {"seed", ctx.cfg.seed},
                           {"fields", to_string(ctx.cfg.fields)},
                           {"language", to_string(p->corpus_language)},
                           {"ngram_range", to_string(ctx.cfg.ngram)},
                           {"rows", ds.rows()},
                           {"unlabeled_linked_issues", corpus.unlabeled},
                           {"classified_api_uses", corpus.coverage.classified},
                           {"unresolved_namespaces", corpus.coverage.unresolved},
                           {"label_cardinality", diag.cardinality},
                           {"label_density", diag.density}};
    save_dataset(dir, ds, prov);
    write_jsonl(dir / "documents.jsonl", corpus.docs);
    write_json(dir / "tfidf.json", tfidf);
    text::write_file(dir / "cooccurrence.csv", cooccurrence_csv(cooccurrence(ds.labels), ds.label_names));
    const auto pos = label_positives(ds.labels);
    const auto in_use = std::count_if(pos.begin(), pos.end(), [](std::size_t v) { return v > 0; });
    ctx.os() << fmt::format("{}: {} rows x {} features, {} labels in use, cardinality {:.3f}, density {:.3f}\n",
                            p->name, ds.rows(), ds.features.cols(), in_use, diag.cardinality, diag.density);
  }
}

// --- train -------------------------------------------------------------------

struct TrainOptions {
  std::filesystem::path dataset;
  std::filesystem::path out;
};

inline ModelBundle train_bundle(const Context& ctx, const std::filesystem::path& dir) {
  const auto ds = load_dataset(dir);
  const auto prov = read_json(dir / "provenance.json");
  const auto filtered = filter_labels(ds, ctx.cfg.label_threshold);
  auto train = filtered.dataset;
  if (ctx.cfg.smote) train = mlsmote(train, ctx.cfg.smote_k, derive_seed(ctx.cfg.seed, 0x5307e));
  ModelBundle b;
  b.vectorizer = read_json(dir / "tfidf.json").get<TfidfModel>();
  b.fields = parse_corpus_fields(prov.at("fields").get<std::string>());
  b.language = parse_corpus_language(prov.at("language").get<std::string>());
  b.projects = {prov.value("project", "")};
  b.config_hash = ctx.cfg.hash();
  b.dropped = filtered.dropped;
  b.model = MultiLabelModel::train(train.features, train.labels, train.label_names, ctx.cfg.algorithm, ctx.cfg.params,
                                   ctx.cfg.seed, ctx.jobs);
  return b;
}

inline void train(const Context& ctx, const TrainOptions& o) {
  const auto b = train_bundle(ctx, o.dataset);
  write_json(o.out, b);
  ctx.os() << fmt::format("trained {} on {} labels ({} dropped); model {} -> {}\n", to_string(b.model.algorithm()),
                          b.model.label_names().size(), b.dropped.size(), b.hash(), o.out.filename().string());
}

// --- evaluate / transfer -----------------------------------------------------

struct EvaluateOptions {
  std::filesystem::path model;    // with dataset: score a trained model
  std::filesystem::path dataset;
  std::filesystem::path out;      // report directory
  std::optional<ExperimentMode> mode;
};

inline EvalReport evaluate_model(const Context& ctx, const ModelBundle& b, const std::filesystem::path& dataset) {
  const auto ds = load_dataset(dataset);
  const auto docs = read_jsonl<Document>(dataset / "documents.jsonl");
  if (docs.size() != ds.rows()) throw IntegrityError("documents.jsonl and labels.csv disagree on row count");
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].row_id != ds.row_ids[i]) throw IntegrityError("documents.jsonl row order differs from labels.csv");
    if (docs[i].fields != b.fields || docs[i].language != b.language)
      throw CompatibilityError("dataset corpus settings differ from the model's");
    texts.push_back(docs[i].text);
  }
  const auto X = b.vectorizer.transform(texts, ctx.jobs);
  const auto pred = b.model.predict(X, ctx.jobs);
  const auto truth = align_labels(ds, b.model.label_names()).labels;
  RunMetadata meta;
  meta.mode = "evaluate";
  meta.project = b.projects.empty() ? "" : b.projects.front();
  meta.algorithm = to_string(b.model.algorithm());
  meta.corpus_fields = to_string(b.fields);
  meta.ngram_range = to_string(b.vectorizer.ngram_range());
  meta.seed = b.model.seed();
  meta.config_hash = b.config_hash;
  meta.params_hash = b.model.params_hash();
  return EvalReport::build(truth, pred, b.model.label_names(), std::move(meta));
}

inline std::filesystem::path reports_dir(const ExperimentConfig& cfg, const std::string& mode) {
  return cfg.workspace / "reports" / mode;
}

inline void evaluate(const Context& ctx, const EvaluateOptions& o) {
  if (!o.model.empty()) {
    if (o.dataset.empty()) throw UserError("--model needs --dataset");
    const auto r = evaluate_model(ctx, load_model(o.model), o.dataset);
    const auto dir = o.out.empty() ? reports_dir(ctx.cfg, "evaluate") : o.out;
    std::filesystem::create_directories(dir);
    text::write_file(dir / "report.json", nlohmann::json(r).dump(2) + "\n");
    text::write_file(dir / "report.txt", format_report(r));
    ctx.os() << format_report(r);
    return;
  }
  const auto mode = o.mode.value_or(ctx.cfg.mode);
  ExperimentResult res;
  if (mode == ExperimentMode::per_project) res = run_per_project(ctx.cfg, ctx.jobs);
  else if (mode == ExperimentMode::merged) res = run_merged(ctx.cfg, ctx.jobs);
  else res = run_transfer(ctx.cfg);
  const auto dir = o.out.empty() ? reports_dir(ctx.cfg, res.mode) : o.out;
  write_experiment(dir, res);
  ctx.os() << text::read_file(dir / "summary.txt");
}

inline void transfer(const Context& ctx, const std::filesystem::path& out) {
  const auto res = run_transfer(ctx.cfg);
  const auto dir = out.empty() ? reports_dir(ctx.cfg, "transfer") : out;
  write_experiment(dir, res);
  ctx.os() << text::read_file(dir / "summary.txt");
}

// --- predict / apply-labels --------------------------------------------------

struct PredictOptions {
  std::filesystem::path model;
  std::string project;
  std::filesystem::path out;
};

inline std::vector<Issue> open_issues_from_csv(const ProjectConfig& p) {
  const auto schema = p.csv_schema.empty() ? CsvSchema::canonical() : CsvSchema::load(p.csv_schema);
  auto imp = import_csv(p.open_csv.empty() ? p.csv : p.open_csv, schema, p.name);
  std::vector<Issue> out;
  for (auto& i : imp.issues)
    if (i.state == IssueState::open) out.push_back(std::move(i));
  return out;
}

inline void predict(const Context& ctx, const PredictOptions& o) {
  const auto b = load_model(o.model);
  const auto& p = ctx.cfg.project(o.project);
  check_compatible(b, ctx.cfg.fields, p.corpus_language, ctx.cfg.ngram);
  auto opts = ProjectCorpusOptions::from(ctx.cfg, p);
  std::vector<PredictionRecord> recs;
  if (p.tracker == TrackerKind::github) {
    auto t = ctx.tracker(p);
    recs = predict_open_issues(b, *t, opts.get());
  } else {
    recs = predict_issues(b, open_issues_from_csv(p), opts.get());
  }
  write_jsonl(o.out, recs);
  std::size_t labelled = 0;
  for (const auto& r : recs) labelled += r.domains.empty() ? 0 : 1;
  ctx.os() << fmt::format("{}: {} open issues, {} with at least one predicted domain -> {}\n", p.name, recs.size(),
                          labelled, o.out.filename().string());
}

struct ApplyCliOptions {
  std::filesystem::path predictions;
  std::string project;
  bool live = false;
  std::filesystem::path out;
};

inline ApplyReport apply(const Context& ctx, const ApplyCliOptions& o) {
  const auto& p = ctx.cfg.project(o.project);
  const auto recs = read_jsonl<PredictionRecord>(o.predictions);
  for (const auto& r : recs)
    if (r.project != p.name)
      throw ValidationError("prediction for project '" + r.project + "' given to apply-labels for '" + p.name + "'");
  ApplyOptions opt{o.live ? ApplyMode::live : ApplyMode::dry_run, ctx.cfg.labels.prefix, ctx.cfg.labels.color};
  std::unique_ptr<Tracker> t;
  if (p.tracker == TrackerKind::github) {
    if (o.live && ctx.token().empty())
      throw CredentialError("live label write-back needs a write-scoped token in $" + ctx.cfg.token_env);
    t = ctx.tracker(p);
  } else if (o.live) {
    throw UserError("project '" + p.name + "' has no live tracker to write labels to");
  }
  const auto rep = apply_labels(recs, t.get(), opt);
  for (const auto& e : rep.entries) {
    if (e.status == "unchanged") continue;
    ctx.os() << fmt::format("#{} {}: {}{}\n", e.number, e.status, e.to_add.empty() ? "-" : "+ " + text::join(e.to_add, ", "),
                            e.error.empty() ? "" : " (" + e.error + ")");
  }
  ctx.os() << fmt::format("{}: {} issues, {} writes ({})\n", p.name, rep.entries.size(), rep.writes,
                          o.live ? "live" : "dry run");
  if (!o.out.empty()) write_json(o.out, rep);
  if (!rep.stopped_by.empty()) throw PermissionError(rep.stopped_by);
  return rep;
}

// --- report --------------------------------------------------------------------

struct ReportOptions {
  std::filesystem::path reports;
  std::filesystem::path compare;
  std::string metric = "micro_f";
  std::filesystem::path dataset;    // co-occurrence export
  std::filesystem::path out;
};

inline std::vector<EvalReport> collect_reports(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw UserError("not a report directory: " + dir.string());
  std::vector<std::filesystem::path> files_found;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "summary.json")
      files_found.push_back(e.path());
  std::sort(files_found.begin(), files_found.end());
  std::vector<EvalReport> out;
  for (const auto& f : files_found) {
    const auto j = read_json(f);
    if (j.is_object() && j.contains("schema_version") && j.contains("labels")) out.push_back(j.get<EvalReport>());
  }
  if (out.empty()) throw UserError("no evaluation reports under " + dir.string());
  return out;
}

inline void report(const Context& ctx, const ReportOptions& o) {
  if (!o.dataset.empty()) {
    const auto ds = load_dataset(o.dataset);
    const auto csv = cooccurrence_csv(cooccurrence(ds.labels), ds.label_names);
    if (o.out.empty()) ctx.os() << csv;
    else text::write_file(o.out, csv);
    if (o.reports.empty()) return;
  }
  if (o.reports.empty()) throw UserError("report needs --reports or --dataset");
  const auto a = collect_reports(o.reports);
  const auto sa = metric_series(a);
  if (!sa.count(o.metric)) throw UserError("unknown metric '" + o.metric + "'");
  if (o.compare.empty()) {
    nlohmann::json j = aggregate_reports(a);
    for (const auto& [name, v] : sa) {
      const auto s = summarize(v);
      ctx.os() << fmt::format("{:<16} mean {:.4f}  sd {:.4f}  (n={})\n", name, s.mean, s.sd, s.n);
    }
    if (!o.out.empty()) write_json(o.out, j);
    return;
  }
  const auto b = collect_reports(o.compare);
  const auto sb = metric_series(b);
  const auto cmp = compare_runs(o.metric, sa.at(o.metric), sb.at(o.metric));
  ctx.os() << fmt::format("{}: U = {:.1f}, p = {:.4f}{}, Cliff's delta = {:.3f} ({})\n", cmp.metric, cmp.u, cmp.p,
                          cmp.p < 0.05 ? " (significant at 0.05)" : "", cmp.cliff_delta, to_string(cmp.magnitude));
  if (!o.out.empty())
    write_json(o.out, {{"metric", cmp.metric},
                       {"u", cmp.u},
                       {"p", cmp.p},
                       {"significant", cmp.p < 0.05},
                       {"cliff_delta", cmp.cliff_delta},
                       {"magnitude", to_string(cmp.magnitude)}});
}

}  // namespace apidomain::cli
