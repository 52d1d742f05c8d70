#pragma once

#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/app/config.hpp"
#include "apidomain/app/workspace.hpp"
#include "apidomain/common/parallel.hpp"
#include "apidomain/corpus/mlsmote.hpp"
#include "apidomain/corpus/split.hpp"
#include "apidomain/corpus/tfidf.hpp"
#include "apidomain/eval/report.hpp"
#include "apidomain/learn/binary_relevance.hpp"

namespace apidomain {

/// Labels that survive the presence/threshold filter for a whole corpus.
struct LabelSelection {
  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  std::vector<DroppedLabel> dropped;
};

inline LabelSelection select_labels(const LabelMatrix& y, const std::vector<std::string>& names, double threshold) {
  MultiLabelDataset tmp;
  tmp.labels = y;
  tmp.label_names = names;
  tmp.row_ids.resize(y.rows());
  tmp.features = FeatureMatrix(y.rows(), 0);
  const auto f = filter_labels(tmp, threshold);
  LabelSelection s;
  s.names = f.dataset.label_names;
  s.dropped = f.dropped;
  for (const auto& n : s.names)
    for (std::size_t c = 0; c < names.size(); ++c)
      if (names[c] == n) s.columns.push_back(c);
  return s;
}

/// Fits, optionally oversamples, trains and predicts once. Columns with no
/// positive training row cannot be learned; they are predicted negative
/// for every test row instead of reaching the learner's guard.
struct FitPredict {
  LabelMatrix predictions;
  std::vector<std::string> untrainable;
  std::string params_hash;
  TfidfModel vectorizer;
};

inline FitPredict fit_and_predict(const std::vector<std::string>& train_docs, const LabelMatrix& y_train,
                                  const std::vector<std::string>& train_ids, const std::vector<std::string>& test_docs,
                                  const std::vector<std::string>& label_names, std::set<std::string> sources,
                                  const ExperimentConfig& cfg, std::uint64_t seed) {
  FitPredict out;
  out.vectorizer = TfidfModel::fit(train_docs, cfg.ngram, std::move(sources));
  MultiLabelDataset tr;
  tr.features = out.vectorizer.transform(train_docs, 1);
  tr.labels = y_train;
  tr.label_names = label_names;
  tr.row_ids = train_ids;
  if (cfg.smote) tr = mlsmote(tr, cfg.smote_k, derive_seed(seed, 0x5307e));

  std::vector<std::size_t> trainable;
  const auto pos = label_positives(tr.labels);
  for (std::size_t c = 0; c < pos.size(); ++c) {
    if (pos[c] > 0 || cfg.algorithm == Algorithm::dummy) trainable.push_back(c);
    else out.untrainable.push_back(label_names[c]);
  }
  const auto X_test = out.vectorizer.transform(test_docs, 1);
  out.predictions = LabelMatrix(test_docs.size(), label_names.size(), 0);
  out.params_hash = params_hash(cfg.algorithm, cfg.params, cfg.seed);
  if (trainable.empty()) return out;

  std::vector<std::string> names;
  for (auto c : trainable) names.push_back(label_names[c]);
  const auto model =
      MultiLabelModel::train(tr.features, tr.labels.select_cols(trainable), names, cfg.algorithm, cfg.params, cfg.seed);
  const auto p = model.predict(X_test);
  for (std::size_t r = 0; r < p.rows(); ++r)
    for (std::size_t j = 0; j < trainable.size(); ++j) out.predictions(r, trainable[j]) = p(r, j);
  return out;
}

inline RunMetadata base_metadata(const ExperimentConfig& cfg, std::string mode, std::string project) {
  RunMetadata m;
  m.mode = std::move(mode);
  m.project = std::move(project);
  m.algorithm = to_string(cfg.algorithm);
  m.corpus_fields = to_string(cfg.fields);
  m.ngram_range = to_string(cfg.ngram);
  m.seed = cfg.seed;
  m.config_hash = cfg.hash();
  m.params_hash = params_hash(cfg.algorithm, cfg.params, cfg.seed);
  m.smote = cfg.smote;
  return m;
}

struct SplitRunResult {
  std::vector<EvalReport> reports;
  std::vector<DroppedLabel> dropped;
};

/// Label filter on the whole corpus, then ShuffleSplit; each split fits its
/// own vectorizer on the training part only.
inline SplitRunResult evaluate_splits(const LabeledCorpus& corpus, const ExperimentConfig& cfg, const RunMetadata& meta,
                                      const std::set<std::string>& sources, unsigned jobs) {
  if (corpus.rows() < kMinSplitRows)
    throw DatasetTooSmallError("project '" + meta.project + "' has " + std::to_string(corpus.rows()) +
                               " labeled rows; at least " + std::to_string(kMinSplitRows) + " are needed to split");
  const auto sel = select_labels(corpus.labels, corpus.label_names, cfg.label_threshold);
  const auto Y = corpus.labels.select_cols(sel.columns);
  const auto plan = shuffle_split(corpus.rows(), cfg.split.test_fraction, cfg.split.n_splits, cfg.seed);
  const auto ids = corpus.row_ids();

  SplitRunResult res;
  res.dropped = sel.dropped;
  res.reports.resize(plan.splits.size());
  parallel_for(plan.splits.size(), jobs, [&](std::size_t s) {
    const auto& sp = plan.splits[s];
    std::vector<std::string> train_ids;
    for (auto i : sp.train) train_ids.push_back(ids[i]);
    const auto fp = fit_and_predict(corpus.texts(sp.train), Y.select_rows(sp.train), train_ids,
                                    corpus.texts(sp.test), sel.names, sources, cfg, derive_seed(cfg.seed, s));
    auto m = meta;
    m.split_index = static_cast<std::int64_t>(s);
    res.reports[s] = EvalReport::build(Y.select_rows(sp.test), fp.predictions, sel.names, std::move(m));
  });
  return res;
}

struct ExperimentResult {
  std::string mode;
  // project (or "merged" / transfer test project) -> reports
  std::map<std::string, std::vector<EvalReport>> reports;
  std::map<std::string, std::vector<DroppedLabel>> dropped;
  std::map<std::string, std::size_t> rows;
};

inline ExperimentResult run_per_project(const ExperimentConfig& cfg, unsigned jobs = 1) {
  const auto map = load_domain_map(cfg);
  ExperimentResult out;
  out.mode = "per_project";
  for (const auto& p : cfg.projects) {
    const auto corpus = assemble_corpus(cfg, p.name, map);
    spdlog::info("{}: {} labeled issues ({} linked issues without domains)", p.name, corpus.rows(), corpus.unlabeled);
    auto r = evaluate_splits(corpus, cfg, base_metadata(cfg, "per_project", p.name), {p.name}, jobs);
    out.reports[p.name] = std::move(r.reports);
    out.dropped[p.name] = std::move(r.dropped);
    out.rows[p.name] = corpus.rows();
  }
  return out;
}

inline ExperimentResult run_merged(const ExperimentConfig& cfg, unsigned jobs = 1) {
  if (cfg.projects.size() < 2) throw ConfigError("merged mode needs at least two projects");
  for (const auto& p : cfg.projects)
    if (p.corpus_language != cfg.projects.front().corpus_language)
      throw ConfigError("merged mode needs every project to share one corpus language");
  const auto map = load_domain_map(cfg);
  std::vector<LabeledCorpus> parts;
  std::set<std::string> names;
  for (const auto& p : cfg.projects) {
    parts.push_back(assemble_corpus(cfg, p.name, map));
    names.insert(p.name);
  }
  const auto merged = merge_corpora(parts);
  auto meta = base_metadata(cfg, "merged", "merged");
  meta.train_projects.assign(names.begin(), names.end());
  auto r = evaluate_splits(merged, cfg, meta, names, jobs);
  ExperimentResult out;
  out.mode = "merged";
  out.reports["merged"] = std::move(r.reports);
  out.dropped["merged"] = std::move(r.dropped);
  out.rows["merged"] = merged.rows();
  return out;
}

/// Vocabulary, idf and models come from the training projects only; the
/// test project is transformed through the frozen vectorizer.
inline ExperimentResult run_transfer(const ExperimentConfig& cfg) {
  cfg.validate_transfer();
  const auto map = load_domain_map(cfg);
  std::vector<LabeledCorpus> parts;
  for (const auto& t : cfg.transfer.train) parts.push_back(assemble_corpus(cfg, t, map));
  const auto train = merge_corpora(parts);
  const auto test = assemble_corpus(cfg, cfg.transfer.test, map);
  if (train.rows() == 0) throw DatasetTooSmallError("transfer training projects have no labeled rows");
  if (test.rows() == 0)
    throw DatasetTooSmallError("transfer test project '" + cfg.transfer.test + "' has no labeled rows");

  // optional curated subset first, then the usual filter on the training side
  std::vector<std::size_t> cols;
  std::vector<std::string> names;
  if (cfg.transfer.label_subset.empty()) {
    for (std::size_t c = 0; c < train.label_names.size(); ++c) cols.push_back(c);
  } else {
    std::set<std::size_t> picked;
    for (const auto& l : cfg.transfer.label_subset) picked.insert(index_of(parse_domain(l)));
    cols.assign(picked.begin(), picked.end());
  }
  for (auto c : cols) names.push_back(train.label_names[c]);
  const auto sel = select_labels(train.labels.select_cols(cols), names, cfg.label_threshold);
  std::vector<std::size_t> final_cols;
  for (auto c : sel.columns) final_cols.push_back(cols[c]);

  std::vector<std::size_t> all_train(train.rows()), all_test(test.rows());
  std::iota(all_train.begin(), all_train.end(), 0);
  std::iota(all_test.begin(), all_test.end(), 0);
  std::set<std::string> sources(cfg.transfer.train.begin(), cfg.transfer.train.end());
  const auto fp = fit_and_predict(train.texts(all_train), train.labels.select_cols(final_cols), train.row_ids(),
                                  test.texts(all_test), sel.names, sources, cfg, cfg.seed);
  // provenance: the test project's text never reached the vectorizer
  if (fp.vectorizer.sources().count(cfg.transfer.test))
    throw IntegrityError("transfer vectorizer was fitted on the test project '" + cfg.transfer.test + "'");

  auto meta = base_metadata(cfg, "transfer", cfg.transfer.test);
  meta.train_projects = cfg.transfer.train;
  ExperimentResult out;
  out.mode = "transfer";
  out.reports[cfg.transfer.test].push_back(
      EvalReport::build(test.labels.select_cols(final_cols), fp.predictions, sel.names, std::move(meta)));
  out.dropped[cfg.transfer.test] = sel.dropped;
  out.rows[cfg.transfer.test] = test.rows();
  return out;
}

/// reports/<mode>/<project>/split_NN.json, summary.json, summary.txt.
inline void write_experiment(const std::filesystem::path& dir, const ExperimentResult& res) {
  nlohmann::json summary = {{"mode", res.mode}, {"projects", nlohmann::json::object()}};
  std::string txt;
  for (const auto& [project, reports] : res.reports) {
    const auto pdir = dir / project;
    std::filesystem::create_directories(pdir);
    for (const auto& r : reports) {
      const auto file = r.meta.split_index >= 0 ? fmt::format("split_{:02}.json", r.meta.split_index)
                                                : std::string("report.json");
      text::write_file(pdir / file, nlohmann::json(r).dump(2) + "\n");
      txt += format_report(r) + "\n";
    }
    summary["projects"][project] = {{"rows", res.rows.at(project)},
                                    {"runs", reports.size()},
                                    {"dropped_labels", res.dropped.at(project)},
                                    {"metrics", aggregate_reports(reports)}};
    if (!reports.empty()) summary["projects"][project]["config_hash"] = reports.front().meta.config_hash;
    const auto agg = metric_series(reports);
    txt += fmt::format("== {} ({} runs)\n", project, reports.size());
    for (const auto& [name, v] : agg) {
      const auto s = summarize(v);
      txt += fmt::format("  {:<16} mean {:.4f}  sd {:.4f}  min {:.4f}  max {:.4f}\n", name, s.mean, s.sd, s.min, s.max);
    }
    txt += "\n";
  }
  std::filesystem::create_directories(dir);
  text::write_file(dir / "summary.json", summary.dump(2) + "\n");
  text::write_file(dir / "summary.txt", txt);
}

}  // namespace apidomain
