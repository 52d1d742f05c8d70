#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "apidomain/app/config.hpp"
#include "apidomain/codeparse/snapshot.hpp"
#include "apidomain/common/jsonl.hpp"
#include "apidomain/corpus/dataset.hpp"
#include "apidomain/corpus/documents.hpp"
#include "apidomain/ingestion/types.hpp"
#include "apidomain/taxonomy/domain.hpp"
#include "apidomain/taxonomy/domain_map.hpp"
#include "apidomain/taxonomy/labeling.hpp"
#include "apidomain/taxonomy/tokenize.hpp"

namespace apidomain {

// Per-project workspace layout:
//   issues.jsonl changes.jsonl links.mined.jsonl rejects.jsonl   (mine)
//   snapshot.json inventory.csv links.jsonl                      (parse)
//   dataset/                                                     (build-dataset)
namespace files {
inline constexpr const char* issues = "issues.jsonl";
inline constexpr const char* changes = "changes.jsonl";
inline constexpr const char* mined_links = "links.mined.jsonl";
inline constexpr const char* rejects = "rejects.jsonl";
inline constexpr const char* snapshot = "snapshot.json";
inline constexpr const char* inventory = "inventory.csv";
inline constexpr const char* links = "links.jsonl";
inline constexpr const char* dataset = "dataset";
}  // namespace files

inline std::filesystem::path require_file(const std::filesystem::path& p, std::string_view produced_by) {
  if (!std::filesystem::exists(p))
    throw StateError("missing " + p.string() + " (run `" + std::string(produced_by) + "` first)");
  return p;
}

struct ProjectData {
  std::vector<Issue> issues;
  std::vector<ChangeSet> changes;
  std::vector<IssueChangeLink> links;
  FileApiIndex file_apis;
};

inline ProjectData load_project_data(const ExperimentConfig& cfg, const std::string& project) {
  const auto dir = cfg.project_dir(project);
  ProjectData d;
  d.issues = read_jsonl<Issue>(require_file(dir / files::issues, "mine"));
  d.changes = read_jsonl<ChangeSet>(require_file(dir / files::changes, "mine"));
  d.links = read_jsonl<IssueChangeLink>(require_file(dir / files::links, "parse"));
  d.file_apis = read_inventory_csv(require_file(dir / files::inventory, "parse"));
  return d;
}

inline std::set<std::string> configured_blocklist(const ExperimentConfig& cfg) {
  auto b = builtin_blocklist();
  for (const auto& w : cfg.taxonomy.extra_blocklist) b.insert(text::to_lower_ascii(w));
  return b;
}

inline std::vector<std::string> domain_label_names() {
  std::vector<std::string> out;
  for (const auto& d : kDomains) out.emplace_back(d.name);
  return out;
}

inline std::vector<std::string> read_template_lines(const std::filesystem::path& p) {
  std::vector<std::string> out;
  if (p.empty()) return out;
  for (const auto& line : text::split(text::read_file(p), '\n'))
    if (!text::trim(line).empty()) out.emplace_back(text::trim(line));
  return out;
}

/// Cleaning options of a project under the experiment's field selection.
struct ProjectCorpusOptions {
  CorpusOptions options;
  StopwordSet stopwords;  // owned storage when the project overrides the list

  static ProjectCorpusOptions from(const ExperimentConfig& cfg, const ProjectConfig& p) {
    ProjectCorpusOptions o;
    o.options.fields = cfg.fields;
    o.options.language = p.corpus_language;
    o.options.templates = read_template_lines(p.templates);
    if (!p.stopwords.empty()) o.stopwords = load_stopwords(p.stopwords);
    return o;
  }
  const CorpusOptions& get() {
    options.stopwords = stopwords.empty() ? nullptr : &stopwords;
    return options;
  }
};

/// Cleaned documents plus the full 31-column domain label matrix.
struct LabeledCorpus {
  std::vector<Document> docs;
  LabelMatrix labels;
  std::vector<std::string> label_names;
  LabelCoverage coverage;
  std::size_t unlabeled = 0;  // linked issues whose changes mapped to no domain

  std::size_t rows() const { return docs.size(); }

  std::vector<std::string> texts(const std::vector<std::size_t>& idx) const {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(docs[i].text);
    return out;
  }
  std::vector<std::string> row_ids() const {
    std::vector<std::string> out;
    for (const auto& d : docs) out.push_back(d.row_id);
    return out;
  }
};

/// Builds the labeled corpus of one project from its workspace. Issues
/// without any resolved domain are left out (they carry no training signal).
inline LabeledCorpus assemble_corpus(const ExperimentConfig& cfg, const std::string& project, const DomainMap& map) {
  const auto& pc = cfg.project(project);
  const auto data = load_project_data(cfg, project);
  const auto labels = label_issues(data.links, data.changes, data.file_apis, map, configured_blocklist(cfg));
  auto opts = ProjectCorpusOptions::from(cfg, pc);

  LabeledCorpus c;
  c.label_names = domain_label_names();
  c.labels = LabelMatrix(0, kDomainCount);
  std::vector<std::uint8_t> row(kDomainCount);
  for (const auto& issue : data.issues) {
    auto it = labels.find(issue.number);
    if (it == labels.end()) continue;
    c.coverage.merge(it->second.coverage);
    if (it->second.domains.empty()) {
      ++c.unlabeled;
      continue;
    }
    std::fill(row.begin(), row.end(), 0);
    for (auto d : it->second.domains) row[index_of(d)] = 1;
    c.labels.append_row(row);
    c.docs.push_back(make_document(issue, opts.get()));
  }
  return c;
}

/// Concatenation with composed-ID uniqueness enforced.
inline LabeledCorpus merge_corpora(const std::vector<LabeledCorpus>& parts) {
  LabeledCorpus out;
  out.label_names = domain_label_names();
  out.labels = LabelMatrix(0, kDomainCount);
  std::set<std::string> seen;
  for (const auto& p : parts) {
    if (p.label_names != out.label_names) throw IntegrityError("corpora disagree on label columns");
    for (std::size_t r = 0; r < p.rows(); ++r) {
      if (!seen.insert(p.docs[r].row_id).second)
        throw IntegrityError("duplicate composed row id '" + p.docs[r].row_id + "' across merged projects");
      out.docs.push_back(p.docs[r]);
      out.labels.append_row(p.labels.row(r));
    }
    out.coverage.merge(p.coverage);
    out.unlabeled += p.unlabeled;
  }
  return out;
}

inline DomainMap load_domain_map(const ExperimentConfig& cfg) {
  return DomainMap::load(require_file(cfg.domain_map_path(), "classify-apis"));
}

}  // namespace apidomain
