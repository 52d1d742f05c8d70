#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/eval/metrics.hpp"
#include "apidomain/ingestion/csv.hpp"

namespace apidomain {

struct RunMetadata {
  std::string mode;       // per_project | merged | transfer | evaluate
  std::string project;    // tested project (or "merged")
  std::string algorithm;
  std::string corpus_fields;
  std::string ngram_range;
  std::uint64_t seed = 0;
  std::int64_t split_index = -1;  // -1: not a split run
  std::string config_hash;
  std::string params_hash;
  std::vector<std::string> train_projects;
  bool smote = false;

  bool operator==(const RunMetadata&) const = default;
};

inline void to_json(nlohmann::json& j, const RunMetadata& m) {
  j = {{"mode", m.mode},
       {"project", m.project},
       {"algorithm", m.algorithm},
       {"corpus_fields", m.corpus_fields},
       {"ngram_range", m.ngram_range},
       {"seed", m.seed},
       {"split_index", m.split_index},
       {"config_hash", m.config_hash},
       {"params_hash", m.params_hash},
       {"train_projects", m.train_projects},
       {"smote", m.smote}};
}
inline void from_json(const nlohmann::json& j, RunMetadata& m) {
  m.mode = j.value("mode", "");
  m.project = j.value("project", "");
  m.algorithm = j.value("algorithm", "");
  m.corpus_fields = j.value("corpus_fields", "");
  m.ngram_range = j.value("ngram_range", "");
  m.seed = j.value("seed", std::uint64_t{0});
  m.split_index = j.value("split_index", std::int64_t{-1});
  m.config_hash = j.value("config_hash", "");
  m.params_hash = j.value("params_hash", "");
  m.train_projects = j.value("train_projects", std::vector<std::string>{});
  m.smote = j.value("smote", false);
}

struct EvalReport {
  static constexpr int kSchemaVersion = 1;

  RunMetadata meta;
  std::vector<std::string> label_names;
  ConfusionCounts counts;
  double hamming = 0.0;
  Prf micro;
  Prf macro;
  std::size_t rows = 0;

  static EvalReport build(const LabelMatrix& truth, const LabelMatrix& pred, std::vector<std::string> names,
                          RunMetadata meta) {
    if (names.size() != truth.cols()) throw ParameterError("report: label names do not match columns");
    EvalReport r;
    r.meta = std::move(meta);
    r.label_names = std::move(names);
    r.counts = confusion(truth, pred);
    r.hamming = hamming_loss(truth, pred);
    r.micro = micro_metrics(r.counts);
    r.macro = macro_metrics(r.counts);
    r.rows = truth.rows();
    return r;
  }
};

inline nlohmann::json prf_json(const Prf& m) {
  nlohmann::json j = {{"precision", m.precision}, {"recall", m.recall}, {"f", m.f}};
  nlohmann::json flags = nlohmann::json::array();
  if (m.precision_undefined) flags.push_back("precision");
  if (m.recall_undefined) flags.push_back("recall");
  if (m.f_undefined) flags.push_back("f");
  if (!flags.empty()) j["degenerate"] = flags;
  return j;
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  auto labels = nlohmann::json::array();
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    const auto& c = r.counts[i];
    auto row = prf_json(label_metrics(c));
    row["label"] = r.label_names[i];
    row["tn"] = c.tn;
    row["fp"] = c.fp;
    row["fn"] = c.fn;
    row["tp"] = c.tp;
    labels.push_back(std::move(row));
  }
  j = {{"schema_version", EvalReport::kSchemaVersion},
       {"meta", r.meta},
       {"rows", r.rows},
       {"hamming_loss", r.hamming},
       {"micro", prf_json(r.micro)},
       {"macro", prf_json(r.macro)},
       {"labels", labels}};
}

inline void from_json(const nlohmann::json& j, EvalReport& r) {
  if (j.value("schema_version", 0) != EvalReport::kSchemaVersion) throw SchemaError("unsupported report schema");
  r = EvalReport{};
  r.meta = j.at("meta").get<RunMetadata>();
  r.rows = j.at("rows").get<std::size_t>();
  for (const auto& l : j.at("labels")) {
    r.label_names.push_back(l.at("label").get<std::string>());
    r.counts.push_back({l.at("tp").get<std::size_t>(), l.at("fp").get<std::size_t>(), l.at("fn").get<std::size_t>(),
                        l.at("tn").get<std::size_t>()});
  }
  r.hamming = j.at("hamming_loss").get<double>();
  r.micro = micro_metrics(r.counts);
  r.macro = r.counts.empty() ? Prf{} : macro_metrics(r.counts);
}

/// Human-readable table; per-label columns follow TN FP FN TP order.
inline std::string format_report(const EvalReport& r) {
  std::size_t w = 5;
  for (const auto& n : r.label_names) w = std::max(w, n.size());
  std::string out;
  out += fmt::format("{} | project {} | {} | fields {} | ngrams {} | seed {}", r.meta.mode, r.meta.project,
                     r.meta.algorithm, r.meta.corpus_fields, r.meta.ngram_range, r.meta.seed);
  if (r.meta.split_index >= 0) out += fmt::format(" | split {}", r.meta.split_index);
  out += "\n";
  out += fmt::format("{:<{}}  {:>6} {:>6} {:>6} {:>6}  {:>9} {:>6} {:>9}\n", "label", w, "TN", "FP", "FN", "TP",
                     "precision", "recall", "f-measure");
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    const auto& c = r.counts[i];
    const auto m = label_metrics(c);
    out += fmt::format("{:<{}}  {:>6} {:>6} {:>6} {:>6}  {:>9.4f} {:>6.4f} {:>9.4f}\n", r.label_names[i], w, c.tn,
                       c.fp, c.fn, c.tp, m.precision, m.recall, m.f);
  }
  out += fmt::format("{:<{}}  {:>9.4f} {:>6.4f} {:>9.4f}\n", "micro", w + 29, r.micro.precision, r.micro.recall,
                     r.micro.f);
  out += fmt::format("{:<{}}  {:>9.4f} {:>6.4f} {:>9.4f}\n", "macro", w + 29, r.macro.precision, r.macro.recall,
                     r.macro.f);
  out += fmt::format("hamming loss {:.4f} over {} rows x {} labels\n", r.hamming, r.rows, r.label_names.size());
  return out;
}

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (0 for a single run)
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

inline MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

inline void to_json(nlohmann::json& j, const MetricSummary& s) {
  j = {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

/// Named per-run metric series (used for aggregation and comparisons).
inline std::map<std::string, std::vector<double>> metric_series(const std::vector<EvalReport>& reports) {
  std::map<std::string, std::vector<double>> s;
  for (const auto& r : reports) {
    s["hamming_loss"].push_back(r.hamming);
    s["micro_precision"].push_back(r.micro.precision);
    s["micro_recall"].push_back(r.micro.recall);
    s["micro_f"].push_back(r.micro.f);
    s["macro_precision"].push_back(r.macro.precision);
    s["macro_recall"].push_back(r.macro.recall);
    s["macro_f"].push_back(r.macro.f);
  }
  return s;
}

inline nlohmann::json aggregate_reports(const std::vector<EvalReport>& reports) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : metric_series(reports)) j[name] = summarize(v);
  return j;
}

inline std::string cooccurrence_csv(const Matrix<std::size_t>& m, const std::vector<std::string>& names) {
  if (m.rows() != names.size() || m.cols() != names.size())
    throw ParameterError("co-occurrence matrix does not match label names");
  std::vector<std::string> header{"label"};
  header.insert(header.end(), names.begin(), names.end());
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{names[i]};
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(std::to_string(m(i, j)));
    out += csv_line(row);
  }
  return out;
}

}  // namespace apidomain
