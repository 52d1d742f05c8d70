#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/codeparse/imports.hpp"
#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/ingestion/csv.hpp"
#include "apidomain/ingestion/types.hpp"

namespace apidomain {

/// Files and namespaces present in one checkout of a project.
struct SnapshotIndex {
  std::set<std::string> file_paths;
  std::set<std::string> api_namespaces;

  friend bool operator==(const SnapshotIndex&, const SnapshotIndex&) = default;
};

inline void to_json(json& j, const SnapshotIndex& s) {
  j = json{{"file_paths", s.file_paths}, {"api_namespaces", s.api_namespaces}};
}
inline void from_json(const json& j, SnapshotIndex& s) {
  s.file_paths = j.at("file_paths").get<std::set<std::string>>();
  s.api_namespaces = j.at("api_namespaces").get<std::set<std::string>>();
}

/// Per-file import lists: repo-relative path -> references.
using FileApiIndex = std::map<std::string, std::vector<ApiReference>>;

struct SnapshotBuild {
  SnapshotIndex index;
  FileApiIndex file_apis;
  std::size_t unreadable = 0;
};

inline bool has_language_extension(const std::filesystem::path& p, Language lang) {
  const auto ext = text::to_lower_ascii(p.extension().string());
  const auto exts = language_extensions(lang);
  return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

/// Parses every source file of `lang` under `root`. Paths are recorded
/// relative to root with '/' separators; traversal order does not matter.
inline SnapshotBuild build_snapshot(const std::filesystem::path& root, Language lang) {
  namespace fs = std::filesystem;
  SnapshotBuild out;
  if (!fs::is_directory(root)) throw UserError("checkout directory not found: " + root.string());
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory() && it->path().filename() == ".git") {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && has_language_extension(it->path(), lang)) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const auto rel = fs::relative(file, root).generic_string();
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      spdlog::warn("skipping unreadable file {}", file.string());
      ++out.unreadable;
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
      spdlog::warn("skipping unreadable file {}", file.string());
      ++out.unreadable;
      continue;
    }
    auto refs = parse_imports(ss.str(), lang, rel);
    out.index.file_paths.insert(rel);
    for (const auto& r : refs) out.index.api_namespaces.insert(r.ns);
    out.file_apis[rel] = std::move(refs);
  }
  return out;
}

/// Most common supported language by source-file count (ties: java, csharp, cpp).
inline Language detect_language(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::map<Language, std::size_t> counts;
  for (const auto& e : fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied)) {
    if (!e.is_regular_file()) continue;
    for (auto l : {Language::java, Language::csharp, Language::cpp})
      if (has_language_extension(e.path(), l)) ++counts[l];
  }
  Language best = Language::java;
  std::size_t best_n = 0;
  for (auto l : {Language::java, Language::csharp, Language::cpp}) {
    if (counts[l] > best_n) {
      best = l;
      best_n = counts[l];
    }
  }
  if (best_n == 0) throw DataError("no Java, C# or C++ sources under " + root.string());
  return best;
}

/// A link survives iff its change touches at least one file of the snapshot.
inline std::vector<IssueChangeLink> snapshot_filter(const std::vector<IssueChangeLink>& links,
                                                    const std::vector<ChangeSet>& changes,
                                                    const SnapshotIndex& index) {
  std::map<std::pair<std::string, std::int64_t>, const ChangeSet*> by_number;
  for (const auto& c : changes) by_number[{c.project_id, c.number}] = &c;
  std::vector<IssueChangeLink> out;
  for (const auto& l : links) {
    auto it = by_number.find({l.project_id, l.change});
    if (it == by_number.end()) continue;
    const auto& paths = it->second->changed_file_paths;
    if (std::any_of(paths.begin(), paths.end(),
                    [&](const std::string& p) { return index.file_paths.count(p) > 0; }))
      out.push_back(l);
  }
  return out;
}

/// Inventory CSV: file,namespace,language.
inline std::string inventory_csv(const FileApiIndex& file_apis) {
  std::string out = csv_line({"file", "namespace", "language"});
  for (const auto& [file, refs] : file_apis)
    for (const auto& r : refs) out += csv_line({file, r.ns, std::string(to_string(r.language))});
  return out;
}

inline FileApiIndex read_inventory_csv(const std::filesystem::path& path) {
  const auto records = parse_csv(text::read_file(path));
  if (records.empty() || records.front().fields.size() < 3 || records.front().fields[0] != "file")
    throw SchemaError("inventory " + path.string() + " lacks the file,namespace,language header");
  FileApiIndex out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() < 3) throw DecodeError("inventory row has fewer than 3 fields", records[i].line);
    out[f[0]].push_back({f[1], f[0], parse_language(f[2])});
  }
  return out;
}

}  // namespace apidomain
