#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/common/error.hpp"
#include "apidomain/common/hash.hpp"
#include "apidomain/corpus/dataset.hpp"
#include "apidomain/corpus/documents.hpp"
#include "apidomain/corpus/tfidf.hpp"
#include "apidomain/ingestion/github.hpp"
#include "apidomain/learn/binary_relevance.hpp"
#include "apidomain/taxonomy/domain.hpp"

namespace apidomain {

/// A trained classifier together with the vectorizer and corpus settings
/// needed to apply it to raw issue text.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  MultiLabelModel model;
  TfidfModel vectorizer;
  CorpusFields fields = CorpusFields::body;
  CorpusLanguage language = CorpusLanguage::en;
  std::vector<DroppedLabel> dropped;
  std::string config_hash;
  std::vector<std::string> projects;

  std::string hash() const { return content_hash(nlohmann::json(*this).dump()); }

  friend void to_json(nlohmann::json& j, const ModelBundle& b) {
    j = {{"format_version", kFormatVersion},
         {"corpus", {{"fields", to_string(b.fields)},
                     {"language", to_string(b.language)},
                     {"ngram_range", to_string(b.vectorizer.ngram_range())}}},
         {"projects", b.projects},
         {"config_hash", b.config_hash},
         {"dropped_labels", b.dropped},
         {"vectorizer", b.vectorizer},
         {"model", b.model}};
  }
  friend void from_json(const nlohmann::json& j, ModelBundle& b) {
    if (j.value("format_version", 0) != kFormatVersion) throw SchemaError("unsupported model bundle format");
    b.fields = parse_corpus_fields(j.at("corpus").at("fields").get<std::string>());
    b.language = parse_corpus_language(j.at("corpus").at("language").get<std::string>());
    b.projects = j.value("projects", std::vector<std::string>{});
    b.config_hash = j.value("config_hash", "");
    b.dropped.clear();
    for (const auto& d : j.value("dropped_labels", nlohmann::json::array()))
      b.dropped.push_back({d.at("name").get<std::string>(),
                           d.at("reason").get<std::string>() == "absent" ? DropReason::absent : DropReason::over_threshold,
                           d.at("positives").get<std::size_t>(), d.at("rate").get<double>()});
    b.vectorizer = j.at("vectorizer").get<TfidfModel>();
    b.model = j.at("model").get<MultiLabelModel>();
    if (b.model.n_features() != b.vectorizer.vocabulary_size())
      throw IntegrityError("model feature count differs from its vectorizer vocabulary");
  }
};

inline ModelBundle load_model(const std::filesystem::path& path) {
  try {
    return read_json(path).get<ModelBundle>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

/// Gate: the request's corpus settings must be the ones the model saw.
inline void check_compatible(const ModelBundle& b, CorpusFields fields, CorpusLanguage lang, NgramRange ngram) {
  if (b.fields != fields || b.language != lang || b.vectorizer.ngram_range() != ngram)
    throw CompatibilityError("model was trained with fields " + to_string(b.fields) + ", language " +
                             to_string(b.language) + ", ngrams " + to_string(b.vectorizer.ngram_range()) +
                             " but the request uses " + to_string(fields) + ", " + to_string(lang) + ", " +
                             to_string(ngram));
}

struct PredictionRecord {
  std::string project;
  std::int64_t number = 0;
  std::vector<std::string> domains;       // ApiDomain short names, enum order
  std::map<std::string, double> scores;   // when the learner exposes scores
  std::string model_hash;
};

inline void to_json(nlohmann::json& j, const PredictionRecord& r) {
  j = {{"project", r.project}, {"number", r.number}, {"domains", r.domains}, {"model_hash", r.model_hash}};
  if (!r.scores.empty()) j["scores"] = r.scores;
}
inline void from_json(const nlohmann::json& j, PredictionRecord& r) {
  r.project = j.at("project").get<std::string>();
  r.number = j.at("number").get<std::int64_t>();
  r.domains = j.at("domains").get<std::vector<std::string>>();
  for (const auto& d : r.domains) parse_domain(d);
  r.scores = j.value("scores", std::map<std::string, double>{});
  r.model_hash = j.value("model_hash", "");
}

inline std::vector<PredictionRecord> predict_issues(const ModelBundle& b, const std::vector<Issue>& issues,
                                                    const CorpusOptions& opt) {
  if (opt.fields != b.fields || opt.language != b.language)
    throw CompatibilityError("corpus settings differ from the model's (" + to_string(b.fields) + ", " +
                             to_string(b.language) + ")");
  std::vector<PredictionRecord> out;
  if (issues.empty()) return out;
  std::vector<std::string> docs;
  for (const auto& i : issues) docs.push_back(make_document(i, opt).text);
  const auto X = b.vectorizer.transform(docs, 1);
  const auto Y = b.model.predict(X);
  const auto S = b.model.scores(X);
  const auto mh = b.hash();
  const auto& names = b.model.label_names();
  // report domains in enumeration order regardless of column order
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto c) { return index_of(parse_domain(names[a])) < index_of(parse_domain(names[c])); });
  for (std::size_t r = 0; r < issues.size(); ++r) {
    PredictionRecord rec;
    rec.project = issues[r].project_id;
    rec.number = issues[r].number;
    rec.model_hash = mh;
    for (auto c : order) {
      if (Y(r, c)) rec.domains.push_back(names[c]);
      if (S) rec.scores[names[c]] = (*S)(r, c);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<PredictionRecord> predict_open_issues(const ModelBundle& b, Tracker& tracker,
                                                         const CorpusOptions& opt) {
  auto issues = tracker.fetch_issues(IssueState::open, std::nullopt);
  return predict_issues(b, issues, opt);
}

enum class ApplyMode { dry_run, live };

struct ApplyEntry {
  std::int64_t number = 0;
  std::vector<std::string> wanted;
  std::vector<std::string> present;  // already on the issue
  std::vector<std::string> to_add;
  std::vector<std::string> created;  // label definitions created for this issue (live)
  std::string status;                // planned | applied | unchanged | failed | not_attempted
  std::string error;
};

inline void to_json(nlohmann::json& j, const ApplyEntry& e) {
  j = {{"number", e.number}, {"wanted", e.wanted}, {"present", e.present}, {"to_add", e.to_add},
       {"created", e.created}, {"status", e.status}};
  if (!e.error.empty()) j["error"] = e.error;
}

struct ApplyReport {
  ApplyMode mode = ApplyMode::dry_run;
  std::vector<ApplyEntry> entries;
  std::size_t writes = 0;  // mutating tracker calls performed
  std::string stopped_by;  // permission failure that ended the run, if any
};

inline void to_json(nlohmann::json& j, const ApplyReport& r) {
  j = {{"mode", r.mode == ApplyMode::live ? "live" : "dry_run"}, {"writes", r.writes}, {"entries", r.entries}};
  if (!r.stopped_by.empty()) j["stopped_by"] = r.stopped_by;
}

struct ApplyOptions {
  ApplyMode mode = ApplyMode::dry_run;
  std::string prefix = "api:";
  std::string color = "1d76db";
};

/// Adds the "<prefix><domain>" labels that an issue lacks; creates missing
/// label definitions first. Dry runs only read. Failures are recorded per
/// issue without rollback; a permission failure stops the run, marks the
/// remaining issues not_attempted and is noted in `stopped_by`.
inline ApplyReport apply_labels(const std::vector<PredictionRecord>& records, Tracker* tracker,
                                const ApplyOptions& opt) {
  ApplyReport rep;
  rep.mode = opt.mode;
  if (opt.mode == ApplyMode::live && tracker == nullptr) throw UserError("live label write-back needs a tracker");
  std::set<std::string> repo_labels;
  bool repo_loaded = false;
  bool denied = false;

  for (const auto& rec : records) {
    ApplyEntry e;
    e.number = rec.number;
    for (const auto& d : rec.domains) e.wanted.push_back(tracker_label(parse_domain(d), opt.prefix));
    if (denied) {
      e.status = "not_attempted";
      rep.entries.push_back(std::move(e));
      continue;
    }
    try {
      std::set<std::string> present;
      if (tracker) {
        for (auto& l : tracker->issue_labels(rec.number)) present.insert(text::to_lower_ascii(l));
      }
      for (const auto& w : e.wanted) {
        if (present.count(text::to_lower_ascii(w))) e.present.push_back(w);
        else e.to_add.push_back(w);
      }
      if (e.to_add.empty()) {
        e.status = "unchanged";
      } else if (opt.mode == ApplyMode::dry_run) {
        e.status = "planned";
      } else {
        if (!repo_loaded) {
          for (auto& l : tracker->repository_labels()) repo_labels.insert(text::to_lower_ascii(l));
          repo_loaded = true;
        }
        for (const auto& l : e.to_add) {
          if (repo_labels.count(text::to_lower_ascii(l))) continue;
          tracker->create_label(l, opt.color);
          ++rep.writes;
          repo_labels.insert(text::to_lower_ascii(l));
          e.created.push_back(l);
        }
        tracker->add_labels(rec.number, e.to_add);
        ++rep.writes;
        e.status = "applied";
      }
    } catch (const PermissionError& ex) {
      e.status = "failed";
      e.error = ex.what();
      denied = true;
      rep.stopped_by = ex.what();
    } catch (const RemoteError& ex) {
      e.status = "failed";
      e.error = ex.what();
    }
    rep.entries.push_back(std::move(e));
  }
  if (denied) spdlog::error("label write-back stopped: {}", rep.stopped_by);
  return rep;
}

}  // namespace apidomain
