#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/hash.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/corpus/documents.hpp"
#include "apidomain/corpus/tfidf.hpp"
#include "apidomain/learn/binary_relevance.hpp"
#include "apidomain/taxonomy/domain.hpp"

namespace apidomain {

enum class ExperimentMode { per_project, merged, transfer };

inline std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::per_project: return "per_project";
    case ExperimentMode::merged: return "merged";
    case ExperimentMode::transfer: return "transfer";
  }
  return "?";
}

inline ExperimentMode parse_mode(std::string_view s) {
  const auto v = text::to_lower_ascii(text::trim(s));
  if (v == "per_project" || v == "per-project" || v == "project") return ExperimentMode::per_project;
  if (v == "merged" || v == "merge") return ExperimentMode::merged;
  if (v == "transfer") return ExperimentMode::transfer;
  throw ConfigError("unknown experiment mode '" + std::string(s) + "' (per_project, merged, transfer)");
}

enum class TrackerKind { github, csv };

struct ProjectConfig {
  std::string name;
  TrackerKind tracker = TrackerKind::github;
  std::string language = "java";                   // source language for import parsing
  CorpusLanguage corpus_language = CorpusLanguage::en;
  std::string repo;                                 // owner/name
  std::string api_base = "https://api.github.com";
  std::size_t page_size = 100;
  std::filesystem::path csv;                        // issues export (tracker = csv)
  std::filesystem::path csv_schema;                 // key=column mapping file
  std::filesystem::path open_csv;                   // open issues for predict (tracker = csv)
  std::filesystem::path source;                     // latest source checkout
  std::filesystem::path templates;                  // one template line per line
  std::filesystem::path stopwords;                  // replaces the built-in list
  std::set<std::string> extensions;                 // override source extensions
};

struct SplitConfig {
  double test_fraction = 0.2;
  std::size_t n_splits = 10;
};

struct TransferConfig {
  std::vector<std::string> train;
  std::string test;
  std::vector<std::string> label_subset;
};

struct TaxonomyConfig {
  std::filesystem::path vectors;
  std::filesystem::path decisions;     // scripted review replay
  std::filesystem::path domain_map;    // defaults to <workspace>/domain_map.jsonl
  std::vector<std::string> extra_blocklist;
  std::size_t suggestions = 3;
};

struct LabelWriteConfig {
  std::string prefix = "api:";
  std::string color = "1d76db";
};

struct ExperimentConfig {
  std::filesystem::path base_dir;   // directory of the config file
  std::filesystem::path workspace;
  std::vector<ProjectConfig> projects;
  CorpusFields fields = CorpusFields::body;
  NgramRange ngram{1, 1};
  Algorithm algorithm = Algorithm::forest;
  LearnerParams params{};
  SplitConfig split{};
  std::uint64_t seed = 42;
  bool smote = false;
  std::size_t smote_k = 5;
  double label_threshold = 0.9;
  ExperimentMode mode = ExperimentMode::per_project;
  TransferConfig transfer{};
  TaxonomyConfig taxonomy{};
  LabelWriteConfig labels{};
  std::string token_env = "GITHUB_TOKEN";
  std::string canonical;  // normalized key=value dump; hashed into reports

  const ProjectConfig& project(const std::string& name) const {
    for (const auto& p : projects)
      if (p.name == name) return p;
    throw ConfigError("no project named '" + name + "' in the configuration");
  }

  std::filesystem::path project_dir(const std::string& name) const { return workspace / name; }
  std::filesystem::path domain_map_path() const {
    return taxonomy.domain_map.empty() ? workspace / "domain_map.jsonl" : taxonomy.domain_map;
  }
  std::string hash() const { return content_hash(canonical); }

  /// Checks mode-specific invariants.
  void validate() const {
    if (projects.empty()) throw ConfigError("configuration lists no [project:NAME] sections");
    std::set<std::string> names;
    for (const auto& p : projects)
      if (!names.insert(p.name).second) throw ConfigError("duplicate project '" + p.name + "'");
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0))
      throw ConfigError("split.test_fraction must lie strictly between 0 and 1");
    if (split.n_splits == 0) throw ConfigError("split.n_splits must be >= 1");
    if (!(label_threshold > 0.0 && label_threshold <= 1.0))
      throw ConfigError("experiment.label_threshold must lie in (0, 1]");
    if (mode == ExperimentMode::merged) {
      if (projects.size() < 2) throw ConfigError("merged mode needs at least two projects");
      for (const auto& p : projects)
        if (p.corpus_language != projects.front().corpus_language)
          throw ConfigError("merged mode needs every project to share one corpus language");
    }
    if (mode == ExperimentMode::transfer) validate_transfer();
  }

  void validate_transfer() const {
    if (transfer.train.empty()) throw ConfigError("transfer mode needs at least one training project");
    if (transfer.test.empty()) throw ConfigError("transfer mode needs a test project");
    for (const auto& t : transfer.train) {
      project(t);
      if (t == transfer.test) throw ConfigError("transfer test project '" + t + "' is also a training project");
    }
    const auto& test = project(transfer.test);
    for (const auto& t : transfer.train)
      if (project(t).corpus_language != test.corpus_language)
        throw ConfigError("transfer projects must share one corpus language");
    for (const auto& l : transfer.label_subset) parse_domain(l);
  }
};

namespace detail {

using boost::property_tree::ptree;

inline std::string get_str(const ptree& t, const std::string& key, const std::string& def) {
  return t.get<std::string>(key, def);
}

template <typename T>
T get_num(const ptree& t, const std::string& section, const std::string& key, T def) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return def;
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(std::stod(*v));
    } else {
      std::size_t pos = 0;
      const auto n = std::stoll(*v, &pos);
      if (pos != text::trim(*v).size() || n < 0) throw std::invalid_argument("bad");
      return static_cast<T>(n);
    }
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": '" + *v + "' is not a valid number");
  }
}

inline bool get_bool(const ptree& t, const std::string& section, const std::string& key, bool def) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return def;
  const auto s = text::to_lower_ascii(text::trim(*v));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("[" + section + "] " + key + ": '" + *v + "' is not a boolean");
}

inline std::filesystem::path get_path(const ptree& t, const std::string& key, const std::filesystem::path& base) {
  const auto v = t.get_optional<std::string>(key);
  if (!v || text::trim(*v).empty()) return {};
  std::filesystem::path p(std::string(text::trim(*v)));
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

inline const ptree& section(const ptree& root, const std::string& name) {
  static const ptree empty;
  auto it = root.find(name);
  return it == root.not_found() ? empty : it->second;
}

}  // namespace detail

/// INI configuration. Sections: [paths] [experiment] [split] [smote]
/// [tree] [forest] [logreg] [mlknn] [transfer] [taxonomy] [labels]
/// [tracker] and one [project:NAME] per project. Relative paths resolve
/// against the config file's directory.
inline ExperimentConfig parse_config(std::string_view content, const std::filesystem::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree root;
  {
    std::istringstream in{std::string(content)};
    try {
      pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }
  }
  using detail::get_bool;
  using detail::get_num;
  using detail::get_path;
  using detail::section;

  static const std::set<std::string> known{"paths", "experiment", "split", "smote", "tree", "forest", "logreg",
                                           "mlknn", "transfer", "taxonomy", "labels", "tracker"};
  ExperimentConfig c;
  c.base_dir = base_dir;
  for (const auto& [name, sub] : root) {
    if (name.rfind("project:", 0) == 0) continue;
    if (!known.count(name)) throw ConfigError("unknown config section [" + name + "]");
  }

  const auto& paths = section(root, "paths");
  c.workspace = get_path(paths, "workspace", base_dir);
  if (c.workspace.empty()) c.workspace = base_dir / "work";

  const auto& ex = section(root, "experiment");
  c.fields = parse_corpus_fields(ex.get<std::string>("fields", "B"));
  c.ngram = parse_ngram_range(ex.get<std::string>("ngram", "1-1"));
  c.algorithm = parse_algorithm(ex.get<std::string>("algorithm", "forest"));
  c.seed = get_num<std::uint64_t>(ex, "experiment", "seed", 42);
  c.label_threshold = get_num<double>(ex, "experiment", "label_threshold", 0.9);
  c.mode = parse_mode(ex.get<std::string>("mode", "per_project"));

  const auto& sp = section(root, "split");
  c.split.test_fraction = get_num<double>(sp, "split", "test_fraction", 0.2);
  c.split.n_splits = get_num<std::size_t>(sp, "split", "n_splits", 10);

  const auto& sm = section(root, "smote");
  c.smote = get_bool(sm, "smote", "enabled", false);
  c.smote_k = get_num<std::size_t>(sm, "smote", "k", 5);

  const auto tree_from = [&](const detail::ptree& t, const std::string& s, TreeParams def) {
    def.max_depth = get_num<int>(t, s, "max_depth", def.max_depth);
    def.min_samples_split = get_num<std::size_t>(t, s, "min_samples_split", def.min_samples_split);
    def.min_samples_leaf = get_num<std::size_t>(t, s, "min_samples_leaf", def.min_samples_leaf);
    const auto crit = t.get<std::string>("criterion", "entropy");
    if (crit != "entropy") throw ConfigError("[" + s + "] criterion: only 'entropy' is supported");
    return def;
  };
  c.params.tree = tree_from(section(root, "tree"), "tree", TreeParams{});
  const auto& fo = section(root, "forest");
  c.params.forest.tree = tree_from(fo, "forest", TreeParams{});
  c.params.forest.n_estimators = get_num<std::size_t>(fo, "forest", "n_estimators", 50);
  c.params.forest.bootstrap = get_bool(fo, "forest", "bootstrap", true);
  {
    const auto mf = text::to_lower_ascii(text::trim(fo.get<std::string>("max_features", "sqrt")));
    if (mf == "sqrt") c.params.forest.max_features = 0;
    else if (mf == "all") c.params.forest.max_features = static_cast<std::size_t>(-1);
    else c.params.forest.max_features = get_num<std::size_t>(fo, "forest", "max_features", 0);
  }
  const auto& lr = section(root, "logreg");
  c.params.logreg.lr = get_num<double>(lr, "logreg", "lr", 0.1);
  c.params.logreg.epochs = get_num<std::size_t>(lr, "logreg", "epochs", 500);
  c.params.logreg.l2 = get_num<double>(lr, "logreg", "l2", 1e-4);
  const auto& kn = section(root, "mlknn");
  c.params.mlknn.k = get_num<std::size_t>(kn, "mlknn", "k", 10);
  c.params.mlknn.s = get_num<double>(kn, "mlknn", "s", 1.0);

  const auto& tr = section(root, "transfer");
  c.transfer.train = text::split_list(tr.get<std::string>("train", ""));
  c.transfer.test = std::string(text::trim(tr.get<std::string>("test", "")));
  c.transfer.label_subset = text::split_list(tr.get<std::string>("label_subset", ""));

  const auto& tx = section(root, "taxonomy");
  c.taxonomy.vectors = get_path(tx, "vectors", base_dir);
  c.taxonomy.decisions = get_path(tx, "decisions", base_dir);
  c.taxonomy.domain_map = get_path(tx, "domain_map", base_dir);
  c.taxonomy.extra_blocklist = text::split_list(tx.get<std::string>("blocklist", ""));
  c.taxonomy.suggestions = get_num<std::size_t>(tx, "taxonomy", "suggestions", 3);

  const auto& lb = section(root, "labels");
  c.labels.prefix = lb.get<std::string>("prefix", "api:");
  c.labels.color = lb.get<std::string>("color", "1d76db");

  c.token_env = section(root, "tracker").get<std::string>("token_env", "GITHUB_TOKEN");

  for (const auto& [name, sub] : root) {
    if (name.rfind("project:", 0) != 0) continue;
    ProjectConfig p;
    p.name = std::string(text::trim(name.substr(8)));
    if (p.name.empty() || p.name.find('/') != std::string::npos)
      throw ConfigError("bad project section name [" + name + "]");
    const std::string s = name;
    const auto kind = text::to_lower_ascii(sub.get<std::string>("tracker", "github"));
    if (kind == "github") p.tracker = TrackerKind::github;
    else if (kind == "csv") p.tracker = TrackerKind::csv;
    else throw ConfigError("[" + s + "] tracker: expected github or csv");
    p.language = text::to_lower_ascii(sub.get<std::string>("language", "java"));
    p.corpus_language = parse_corpus_language(sub.get<std::string>("corpus_language", "en"));
    p.repo = sub.get<std::string>("repo", "");
    p.api_base = sub.get<std::string>("api_base", "https://api.github.com");
    p.page_size = get_num<std::size_t>(sub, s, "page_size", 100);
    p.csv = get_path(sub, "csv", base_dir);
    p.csv_schema = get_path(sub, "csv_schema", base_dir);
    p.open_csv = get_path(sub, "open_csv", base_dir);
    p.source = get_path(sub, "source", base_dir);
    p.templates = get_path(sub, "templates", base_dir);
    p.stopwords = get_path(sub, "stopwords", base_dir);
    for (auto& e : text::split_list(sub.get<std::string>("extensions", ""))) {
      auto v = text::to_lower_ascii(e);
      if (v.front() != '.') v.insert(v.begin(), '.');
      p.extensions.insert(v);
    }
    if (p.tracker == TrackerKind::github && p.repo.empty()) throw ConfigError("[" + s + "] repo is required");
    if (p.tracker == TrackerKind::csv && p.csv.empty()) throw ConfigError("[" + s + "] csv is required");
    c.projects.push_back(std::move(p));
  }

  // Canonical form: every leaf as section.key=value, sorted; paths are
  // kept relative as written so the hash does not depend on where the
  // workspace lives.
  std::map<std::string, std::string> flat;
  for (const auto& [sec, sub] : root)
    for (const auto& [key, val] : sub) flat[sec + "." + key] = std::string(text::trim(val.data()));
  for (const auto& [k, v] : flat) c.canonical += k + "=" + v + "\n";
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  auto abs = std::filesystem::absolute(path);
  return parse_config(text::read_file(abs), abs.parent_path());
}

}  // namespace apidomain
